// teampulse: operator CLI for the team-feedback engine.
//
// Subcommands: analyze, feedback, score, serve, session.
// Exit codes: 0 ok, 1 pipeline failure, 2 usage/config error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "teampulse/config.hpp"
#include "teampulse/delivery.hpp"
#include "teampulse/errors.hpp"
#include "teampulse/feedback.hpp"
#include "teampulse/orchestrator.hpp"
#include "teampulse/tasks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace teampulse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

Transcript read_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open transcript file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_transcript(buf.str(), {});
}

json sentiment_json(const SentimentScore& s) {
    return {{"compound", s.compound},
            {"positive", s.positive},
            {"negative", s.negative},
            {"neutral", s.neutral}};
}

json bundle_json(const MetricBundle& bundle, const std::optional<std::string>& member_alias) {
    json out;
    out["task_goal"] = bundle.task_goal;
    out["sentiment"] = {{"team", sentiment_json(bundle.team_sentiment)}};
    out["engagement"] = json::object();
    out["lsm"] = json::object();
    out["flow"] = {{"duration_minutes", bundle.flow.duration_minutes},
                   {"total_word_count", bundle.flow.total_word_count},
                   {"message_counts", json::object()},
                   {"turn_counts", json::object()}};
    for (const auto& m : bundle.members) {
        if (member_alias && m.alias != *member_alias) continue;
        json per;
        per["alias"] = m.alias;
        out["sentiment"][m.alias] = sentiment_json(bundle.member_sentiment.at(m.id));
        out["engagement"][m.alias] = json{
            {"words", bundle.engagement.word_counts.at(m.id)},
            {"ratio", bundle.engagement.ratios.at(m.id)}};
        const auto& lsm = bundle.member_lsm.at(m.id);
        json cats = json::object();
        for (const auto& [cat, score] : lsm.category_scores) cats[cat] = score;
        out["lsm"][m.alias] = {{"overall", lsm.overall}, {"categories", cats}};
        auto mc = bundle.flow.message_counts.find(m.id);
        out["flow"]["message_counts"][m.alias] =
            mc != bundle.flow.message_counts.end() ? mc->second : 0;
        auto tc = bundle.flow.turn_counts.find(m.id);
        out["flow"]["turn_counts"][m.alias] = tc != bundle.flow.turn_counts.end() ? tc->second : 0;
    }
    if (member_alias && !out["engagement"].contains(*member_alias))
        throw NotFoundError("no member with alias '" + *member_alias + "'");
    return out;
}

PromptLength parse_length(const std::string& s) {
    if (s == "short") return PromptLength::short_form;
    if (s == "medium") return PromptLength::medium_form;
    if (s == "long") return PromptLength::long_form;
    throw ConfigError("--length must be short, medium, or long");
}

ContextLevel parse_context(const std::string& s) {
    if (s == "low") return ContextLevel::low;
    if (s == "medium") return ContextLevel::medium;
    if (s == "high") return ContextLevel::high;
    throw ConfigError("--context must be low, medium, or high");
}

std::shared_ptr<Backend> make_backend(const AppConfig& cfg) {
    if (cfg.backend == "mock") return std::make_shared<MockBackend>();
    if (cfg.backend == "replay") return std::make_shared<ReplayBackend>(cfg.replay_dir);
    if (std::getenv(cfg.credential_env.c_str()) == nullptr)
        throw ConfigError("live backend needs the API key in environment variable " +
                          cfg.credential_env);
    HttpBackendConfig hc;
    hc.endpoint = cfg.endpoint;
    hc.model_id = cfg.model_id;
    hc.credential_env = cfg.credential_env;
    hc.timeout = cfg.policy.timeout;
    return std::make_shared<HttpBackend>(hc);
}

std::shared_ptr<ChatAdapter> make_adapter(const AppConfig& cfg, const std::string& run_dir) {
    if (cfg.delivery == "dry-run")
        return std::make_shared<DryRunAdapter>(run_dir + "/messages");
    if (cfg.delivery == "webhook") {
        if (cfg.webhook_url.empty()) throw ConfigError("webhook delivery needs webhook_url");
        return std::make_shared<WebhookAdapter>(cfg.webhook_url);
    }
    if (cfg.workspace_base_url.empty())
        throw ConfigError("workspace delivery needs workspace_base_url");
    return std::make_shared<WorkspaceApiAdapter>(cfg.workspace_base_url, cfg.workspace_token_env);
}

int cmd_analyze(const AppConfig& cfg, const std::string& transcript_path,
                const std::optional<std::string>& member) {
    Transcript t = read_transcript(transcript_path);
    auto valence = ValenceLexicon::load(cfg.valence_path);
    auto funcs = FunctionWordLexicon::load(cfg.function_words_path);
    MetricBundle bundle = analyze(t, valence, funcs);
    std::cout << bundle_json(bundle, member).dump(2) << '\n';
    return kExitOk;
}

int cmd_feedback(AppConfig cfg, const std::string& transcript_path, const std::string& run_dir,
                 const std::optional<std::string>& length, const std::optional<std::string>& context,
                 bool json_output) {
    Transcript t = read_transcript(transcript_path);
    auto valence = ValenceLexicon::load(cfg.valence_path);
    auto funcs = FunctionWordLexicon::load(cfg.function_words_path);
    auto registry = TemplateRegistry::load(cfg.templates_dir);
    auto backend = make_backend(cfg);

    FeedbackConfig fc;
    fc.model_id = cfg.model_id;
    fc.policy = cfg.policy;
    fc.thresholds = cfg.thresholds;
    if (length || context) {
        PromptLength l = length ? parse_length(*length) : PromptLength::long_form;
        ContextLevel c = context ? parse_context(*context) : ContextLevel::medium;
        fc.team_spec = PromptSpec::team_cell(l, c);
        fc.individual_spec = PromptSpec::individual_cell(length ? parse_length(*length)
                                                                : PromptLength::medium_form,
                                                         c);
    }

    MetricBundle bundle = analyze(t, valence, funcs);
    FeedbackCycle cycle = generate_feedback(t, bundle, registry, *backend, fc);

    fs::create_directories(run_dir);
    DryRunAdapter writer(run_dir + "/messages");
    DeliveryLedger ledger;
    Routing routing{t.channel_id};
    DeliveryReport delivery =
        deliver(cycle.messages, routing, t.members, writer, ledger, "cli", fc.deliver_invalid);

    std::ofstream report_file(run_dir + "/cycle_report.json");
    report_file << cycle_report_json(t, bundle, cycle) << '\n';

    json out;
    out["messages"] = json::array();
    for (const auto& m : cycle.messages)
        out["messages"].push_back({{"audience", m.audience == Audience::team ? "team" : "individual"},
                                   {"member_id", m.member_id},
                                   {"valid", m.valid()},
                                   {"violations", m.violations}});
    out["failures"] = cycle.failures;
    out["delivered"] = delivery.all_ok();
    out["run_dir"] = run_dir;
    if (json_output) {
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << cycle.messages.size() << " message(s) written under " << run_dir
                  << "/messages, " << cycle.failures.size() << " failure(s)\n";
        for (const auto& m : cycle.messages)
            if (!m.valid())
                for (const auto& v : m.violations)
                    std::cout << "  invalid (" << m.request_tag << "): " << v << '\n';
    }
    bool ok = cycle.failures.empty() && delivery.all_ok() &&
              std::all_of(cycle.messages.begin(), cycle.messages.end(),
                          [](const FeedbackMessage& m) { return m.valid(); });
    return ok ? kExitOk : kExitPipeline;
}

int cmd_score(const std::string& task_id, const std::vector<std::string>& ranking,
              bool json_output) {
    const TaskDefinition& task = find_task(task_id);
    RankingSubmission submission;
    submission.task_id = task_id;
    submission.ranking = ranking;
    TaskScore score = score_ranking(task, submission);
    if (json_output) {
        json out = {{"task", task_id},
                    {"dist_expert", score.dist_expert},
                    {"dist_worst", score.dist_worst},
                    {"score", score.score_percent()}};
        std::cout << out.dump(2) << '\n';
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", score.score_percent());
        std::cout << buf << '\n';
    }
    return kExitOk;
}

std::atomic<bool> g_stop{false};

int cmd_serve(AppConfig cfg, const std::string& run_dir, const std::string& channels_csv,
              int interval_seconds, int ticks) {
    fs::create_directories(run_dir);
    auto valence = ValenceLexicon::load(cfg.valence_path);
    auto funcs = FunctionWordLexicon::load(cfg.function_words_path);
    auto registry = TemplateRegistry::load(cfg.templates_dir);
    auto backend = make_backend(cfg);
    auto adapter = make_adapter(cfg, run_dir);

    std::vector<ChannelSchedule> schedules;
    std::stringstream ss(channels_csv);
    std::string channel;
    while (std::getline(ss, channel, ','))
        if (!channel.empty())
            schedules.push_back({channel, std::chrono::seconds(interval_seconds)});
    if (schedules.empty()) throw ConfigError("--channels must name at least one channel");

    WatermarkStore watermarks = WatermarkStore::load(run_dir + "/watermarks.json");
    SystemClock clock;
    EventLog log(run_dir + "/events.jsonl");
    DeliveryLedger ledger;

    FeedbackConfig fc;
    fc.model_id = cfg.model_id;
    fc.policy = cfg.policy;
    fc.thresholds = cfg.thresholds;

    // Each channel's transcript is read from <run_dir>/inbox/<channel>.json;
    // a chat-platform poller would drop exports there.
    auto cycle = [&](const std::string& channel_id,
                     std::optional<Timestamp> mark) -> std::optional<Timestamp> {
        std::string path = run_dir + "/inbox/" + channel_id + ".json";
        if (!fs::exists(path)) return std::nullopt;
        Transcript t = read_transcript(path);
        if (t.messages.empty()) return std::nullopt;
        Timestamp newest = t.messages.back().timestamp;
        if (mark && newest <= *mark) return std::nullopt;
        MetricBundle bundle = analyze(t, valence, funcs);
        FeedbackCycle fc_cycle = generate_feedback(t, bundle, registry, *backend, fc);
        Routing routing{channel_id};
        deliver(fc_cycle.messages, routing, t.members, *adapter, ledger,
                channel_id + "@" + format_rfc3339(newest), fc.deliver_invalid);
        std::ofstream report(run_dir + "/cycle_" + channel_id + ".json");
        report << cycle_report_json(t, bundle, fc_cycle) << '\n';
        log.emit(clock, "cycle", {{"channel", channel_id}, {"newest", format_rfc3339(newest)}});
        return newest;
    };

    int tick = 0;
    while (!g_stop && (ticks < 0 || tick < ticks)) {
        auto runs = run_scheduled(schedules, watermarks, clock, cycle);
        for (const auto& r : runs) {
            std::map<std::string, std::string> fields = {
                {"channel", r.channel_id},
                {"state", r.skipped ? "skipped" : (r.ok ? "ran" : "failed")}};
            if (!r.detail.empty()) fields["detail"] = r.detail;
            log.emit(clock, "tick", fields);
            if (!r.ok) std::cerr << "channel " << r.channel_id << ": " << r.detail << '\n';
        }
        ++tick;
        if (ticks >= 0 && tick >= ticks) break;
        std::this_thread::sleep_for(std::chrono::seconds(interval_seconds));
    }
    std::cout << "served " << tick << " tick(s); artifacts under " << run_dir << '\n';
    return kExitOk;
}

// Synthesizes a small deterministic discussion so a simulated session is
// self-contained; real sessions would pull transcripts from the platform.
Transcript synth_transcript(const TeamAssignment& team, const TaskDefinition& task, int round,
                            Timestamp start) {
    static const char* kLines[] = {
        "I think we should start with the items that keep us alive longest.",
        "Good point, signaling for rescue matters more than food at first.",
        "Let's agree on the top three and then sort the rest quickly.",
        "I'd put the water near the top, we won't last without it.",
        "Yes, and the heavy gear is probably dead weight for us.",
        "Okay, I wrote our order down, everyone happy to submit this?"};
    json doc;
    doc["schema_version"] = 1;
    doc["channel_id"] = team.team_id;
    doc["task_goal"] = task.scenario;
    doc["members"] = json::array();
    for (std::size_t i = 0; i < team.member_ids.size(); ++i)
        doc["members"].push_back({{"id", team.member_ids[i]},
                                  {"alias", "member-" + std::to_string(i + 1)}});
    doc["messages"] = json::array();
    for (int i = 0; i < 6; ++i) {
        Timestamp ts = start + std::chrono::seconds(30 + 90 * i) + std::chrono::seconds(round);
        doc["messages"].push_back(
            {{"sender_id", team.member_ids[i % team.member_ids.size()]},
             {"ts", format_rfc3339(ts)},
             {"text", kLines[i]}});
    }
    return parse_transcript(doc.dump(), {});
}

int cmd_session(AppConfig cfg, const std::string& plan_path, const std::string& run_dir,
                bool simulated_clock) {
    fs::create_directories(run_dir);
    std::ifstream in(plan_path);
    if (!in) throw ConfigError("cannot open session plan " + plan_path);
    json plan_doc;
    try {
        in >> plan_doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("session plan is not valid JSON: ") + e.what());
    }

    SessionPlan plan;
    plan.team_size = plan_doc.value("team_size", 3);
    plan.seed = plan_doc.value("seed", 0);
    plan.round_duration = std::chrono::seconds(plan_doc.value("round_duration_seconds", 600));
    plan.feedback_window = std::chrono::seconds(plan_doc.value("feedback_window_seconds", 180));
    std::vector<std::string> participants =
        plan_doc.at("participants").get<std::vector<std::string>>();
    std::vector<std::string> round_tasks =
        plan_doc.value("rounds", std::vector<std::string>{"northern-canada", "open-ocean", "moon"});
    plan.rounds = static_cast<int>(round_tasks.size());

    std::vector<const TaskDefinition*> round_defs;
    for (const auto& id : round_tasks) round_defs.push_back(&find_task(id));

    auto teams = assemble_teams(participants, plan.team_size, plan.seed);

    auto valence = ValenceLexicon::load(cfg.valence_path);
    auto funcs = FunctionWordLexicon::load(cfg.function_words_path);
    auto registry = TemplateRegistry::load(cfg.templates_dir);
    auto backend = make_backend(cfg);

    std::unique_ptr<Clock> clock;
    if (simulated_clock)
        clock = std::make_unique<SimulatedClock>(parse_rfc3339("2026-01-05T09:00:00Z"));
    else
        clock = std::make_unique<SystemClock>();
    EventLog log(run_dir + "/events.jsonl");

    FeedbackConfig fc;
    fc.model_id = cfg.model_id;
    fc.policy = cfg.policy;
    fc.thresholds = cfg.thresholds;

    DeliveryLedger ledger;
    DryRunAdapter adapter(run_dir + "/messages");

    int feedback_deliveries_to_control = 0;
    json summary;
    summary["teams"] = json::array();
    for (const auto& team : teams)
        summary["teams"].push_back({{"team_id", team.team_id},
                                    {"members", team.member_ids},
                                    {"condition", to_string(team.condition)}});
    summary["rounds"] = json::array();

    for (int round = 1; round <= plan.rounds; ++round) {
        const TaskDefinition& task = *round_defs[round - 1];
        for (const auto& team : teams) {
            RoundInputs inputs;
            inputs.round_number = round;
            inputs.task = &task;
            inputs.transcript = synth_transcript(team, task, round, clock->now());
            RankingSubmission submission;
            submission.task_id = task.task_id;
            submission.ranking = task.expert_ranking;
            // Deterministic per-team imperfection: swap one adjacent pair.
            std::size_t swap_at = (plan.seed + team.team_id.size() + round) %
                                  (submission.ranking.size() - 1);
            std::swap(submission.ranking[swap_at], submission.ranking[swap_at + 1]);
            inputs.submission = submission;

            auto feedback_fn = [&](const Transcript& t) {
                MetricBundle bundle = analyze(t, valence, funcs);
                return generate_feedback(t, bundle, registry, *backend, fc);
            };
            auto deliver_fn = [&](const FeedbackCycle& cycle) {
                Routing routing{team.team_id};
                auto report = deliver(cycle.messages, routing,
                                      inputs.transcript.members, adapter, ledger,
                                      team.team_id + "/round-" + std::to_string(round),
                                      fc.deliver_invalid);
                if (team.condition == Condition::control)
                    feedback_deliveries_to_control += static_cast<int>(report.entries.size());
                return report;
            };

            RoundResult result =
                run_round(team, inputs, plan, *clock, log, feedback_fn, deliver_fn);
            json r = {{"team", team.team_id},
                      {"round", round},
                      {"condition", to_string(team.condition)},
                      {"ok", result.ok},
                      {"feedback_messages",
                       result.feedback ? result.feedback->messages.size() : 0}};
            if (result.score) r["score"] = result.score->score_percent();
            json phases = json::array();
            for (auto p : result.phases) phases.push_back(to_string(p));
            r["phases"] = phases;
            summary["rounds"].push_back(std::move(r));
        }
    }

    summary["control_feedback_deliveries"] = feedback_deliveries_to_control;
    std::ofstream out(run_dir + "/session_summary.json");
    out << summary.dump(2) << '\n';
    std::cout << teams.size() << " team(s), " << plan.rounds << " round(s), "
              << summary["rounds"].size() << " round state(s); summary in " << run_dir
              << "/session_summary.json\n";
    return feedback_deliveries_to_control == 0 ? kExitOk : kExitPipeline;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, [](int) { g_stop = true; });

    CLI::App app{"Automated team-feedback engine"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");
    std::string data_dir = "data";
    app.add_option("--data-dir", data_dir, "data directory (lexicons + templates)");
    bool json_output = false;
    app.add_flag("--json", json_output, "machine-readable output");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "compute communication metrics");
    std::string transcript_path;
    analyze_cmd->add_option("transcript", transcript_path, "transcript JSON file")->required();
    std::string member_filter;
    analyze_cmd->add_option("--member", member_filter, "restrict output to one member alias");

    // feedback
    auto* feedback_cmd = app.add_subcommand("feedback", "generate and write feedback messages");
    std::string fb_transcript;
    feedback_cmd->add_option("transcript", fb_transcript, "transcript JSON file")->required();
    bool use_mock = false, use_live = false;
    std::string replay_dir;
    feedback_cmd->add_flag("--mock", use_mock, "deterministic offline backend");
    feedback_cmd->add_option("--replay", replay_dir, "replay fixtures from a directory");
    feedback_cmd->add_flag("--live", use_live, "HTTP backend from config");
    std::string length_flag, context_flag;
    feedback_cmd->add_option("--length", length_flag, "short|medium|long");
    feedback_cmd->add_option("--context", context_flag, "low|medium|high");
    std::string run_dir = "run";
    feedback_cmd->add_option("--run-dir", run_dir, "artifact directory");

    // score
    auto* score_cmd = app.add_subcommand("score", "score a survival-task ranking");
    std::string task_id;
    score_cmd->add_option("task", task_id, "task id (northern-canada|open-ocean|moon)")
        ->required();
    std::vector<std::string> ranking;
    score_cmd->add_option("items", ranking, "ranked items, best first")->required();

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "scheduled feedback cycles");
    std::string channels = "general";
    serve_cmd->add_option("--channels", channels, "comma-separated channel ids");
    int interval_seconds = 600;
    serve_cmd->add_option("--interval", interval_seconds, "tick interval, seconds")
        ->check(CLI::PositiveNumber);
    int ticks = 1;
    serve_cmd->add_option("--ticks", ticks, "tick count (-1 = run until interrupted)");
    std::string serve_run_dir = "run";
    serve_cmd->add_option("--run-dir", serve_run_dir, "artifact directory");

    // session
    auto* session_cmd = app.add_subcommand("session", "run the experiment protocol");
    std::string plan_path;
    session_cmd->add_option("plan", plan_path, "session plan JSON file")->required();
    bool simulated = false;
    session_cmd->add_flag("--simulated-clock", simulated, "run timers in simulated time");
    std::string session_run_dir = "run";
    session_cmd->add_option("--run-dir", session_run_dir, "artifact directory");

    CLI11_PARSE(app, argc, argv);

    try {
        AppConfig cfg =
            config_path.empty() ? default_config(data_dir) : load_config(config_path);
        if (*analyze_cmd) {
            std::optional<std::string> member;
            if (!member_filter.empty()) member = member_filter;
            return cmd_analyze(cfg, transcript_path, member);
        }
        if (*feedback_cmd) {
            if (use_mock + use_live + !replay_dir.empty() > 1)
                throw ConfigError("--mock, --replay, and --live are mutually exclusive");
            if (use_mock) cfg.backend = "mock";
            if (use_live) cfg.backend = "http";
            if (!replay_dir.empty()) {
                cfg.backend = "replay";
                cfg.replay_dir = replay_dir;
            }
            std::optional<std::string> length, context;
            if (!length_flag.empty()) length = length_flag;
            if (!context_flag.empty()) context = context_flag;
            return cmd_feedback(cfg, fb_transcript, run_dir, length, context, json_output);
        }
        if (*score_cmd) return cmd_score(task_id, ranking, json_output);
        if (*serve_cmd) return cmd_serve(cfg, serve_run_dir, channels, interval_seconds, ticks);
        if (*session_cmd) return cmd_session(cfg, plan_path, session_run_dir, simulated);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPipeline;
    }
}
