#include "teampulse/orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <thread>

#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

Timestamp SystemClock::now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now());
}

void SystemClock::sleep_until(Timestamp t) { std::this_thread::sleep_until(t); }

WatermarkStore WatermarkStore::load(const std::string& path) {
    WatermarkStore store;
    store.path_ = path;
    std::ifstream in(path);
    if (!in) return store;  // first run: empty store
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("watermark file " + path + " is not valid JSON: " + e.what());
    }
    for (auto& [channel, value] : j.items())
        store.marks_[channel] = parse_rfc3339(value.get<std::string>());
    return store;
}

void WatermarkStore::save() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [channel, t] : marks_) j[channel] = format_rfc3339(t);
    std::ofstream out(path_);
    if (!out) throw ConfigError("cannot write watermark file " + path_);
    out << j.dump(2) << '\n';
}

std::optional<Timestamp> WatermarkStore::watermark(const std::string& channel_id) const {
    auto it = marks_.find(channel_id);
    if (it == marks_.end()) return std::nullopt;
    return it->second;
}

void WatermarkStore::set_watermark(const std::string& channel_id, Timestamp t) {
    // Monotone: a cycle can only move the watermark forward.
    auto it = marks_.find(channel_id);
    if (it == marks_.end() || t > it->second) marks_[channel_id] = t;
}

std::vector<ScheduledRun> run_scheduled(const std::vector<ChannelSchedule>& schedules,
                                        WatermarkStore& watermarks, Clock& clock,
                                        const CycleRunner& run_cycle) {
    std::vector<ScheduledRun> runs;
    for (const auto& schedule : schedules) {
        ScheduledRun run;
        run.channel_id = schedule.channel_id;
        auto mark = watermarks.watermark(schedule.channel_id);
        try {
            std::optional<Timestamp> newest = run_cycle(schedule.channel_id, mark);
            if (!newest) {
                run.skipped = true;
                run.ok = true;
                run.detail = "no messages newer than the watermark";
            } else {
                run.ran = true;
                run.ok = true;
                watermarks.set_watermark(schedule.channel_id, *newest);
                watermarks.save();
            }
        } catch (const std::exception& e) {
            run.ran = true;
            run.ok = false;
            run.detail = e.what();  // watermark untouched: next tick retries
        }
        runs.push_back(std::move(run));
    }
    (void)clock;
    return runs;
}

const char* to_string(Condition c) {
    return c == Condition::control ? "control" : "treatment";
}

const char* to_string(RoundPhase p) {
    switch (p) {
        case RoundPhase::discussing: return "discussing";
        case RoundPhase::submitting: return "submitting";
        case RoundPhase::scored: return "scored";
        case RoundPhase::feedback: return "feedback";
        case RoundPhase::done: return "done";
    }
    return "unknown";
}

std::vector<TeamAssignment> assemble_teams(const std::vector<std::string>& participants,
                                           int team_size, std::uint64_t seed,
                                           bool allow_remainder) {
    if (team_size <= 0) throw ConfigError("team_size must be positive");
    const std::size_t remainder = participants.size() % static_cast<std::size_t>(team_size);
    if (remainder != 0 && !allow_remainder)
        throw ConfigError("roster of " + std::to_string(participants.size()) +
                          " does not divide into teams of " + std::to_string(team_size));

    std::vector<std::string> pool = participants;
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    if (remainder != 0) pool.resize(pool.size() - remainder);

    std::vector<TeamAssignment> teams;
    for (std::size_t i = 0; i + team_size <= pool.size(); i += team_size) {
        TeamAssignment team;
        const std::size_t index = teams.size() + 1;
        team.team_id = "team-" + std::string(index < 10 ? "0" : "") + std::to_string(index);
        team.member_ids.assign(pool.begin() + i, pool.begin() + i + team_size);
        team.condition = teams.size() % 2 == 0 ? Condition::control : Condition::treatment;
        teams.push_back(std::move(team));
    }
    return teams;
}

EventLog::EventLog(const std::string& path) : path_(path) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw ConfigError("cannot open event log " + path_);
}

void EventLog::emit(Clock& clock, const std::string& type,
                    const std::map<std::string, std::string>& fields) {
    nlohmann::json j;
    j["ts"] = format_rfc3339(clock.now());
    j["type"] = type;
    for (const auto& [k, v] : fields) j[k] = v;
    std::ofstream out(path_, std::ios::app);
    out << j.dump() << '\n';
}

RoundResult run_round(const TeamAssignment& team, const RoundInputs& inputs,
                      const SessionPlan& plan, Clock& clock, EventLog& log,
                      const std::function<FeedbackCycle(const Transcript&)>& feedback_fn,
                      const std::function<DeliveryReport(const FeedbackCycle&)>& deliver_fn) {
    RoundResult result;
    const std::string round = std::to_string(inputs.round_number);
    auto enter = [&](RoundPhase phase) {
        result.phases.push_back(phase);
        log.emit(clock, "phase",
                 {{"team", team.team_id}, {"round", round}, {"phase", to_string(phase)}});
    };

    enter(RoundPhase::discussing);
    clock.sleep_until(clock.now() + plan.round_duration);

    enter(RoundPhase::submitting);
    if (inputs.task == nullptr) {
        result.ok = false;
        result.detail = "no task bound to this round";
        enter(RoundPhase::done);
        return result;
    }
    if (!inputs.submission) {
        result.detail = "no submission before the deadline";
        log.emit(clock, "unsubmitted", {{"team", team.team_id}, {"round", round}});
        enter(RoundPhase::done);
        return result;
    }
    try {
        result.score = score_ranking(*inputs.task, *inputs.submission);
    } catch (const std::exception& e) {
        result.ok = false;
        result.detail = std::string("submission rejected: ") + e.what();
        log.emit(clock, "submission_rejected",
                 {{"team", team.team_id}, {"round", round}, {"detail", e.what()}});
        enter(RoundPhase::done);
        return result;
    }

    enter(RoundPhase::scored);
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", result.score->score_percent());
        log.emit(clock, "scored",
                 {{"team", team.team_id}, {"round", round}, {"score", buf}});
    }

    if (team.condition == Condition::treatment) {
        enter(RoundPhase::feedback);
        const Timestamp deadline = clock.now() + plan.feedback_window;
        try {
            FeedbackCycle cycle = feedback_fn(inputs.transcript);
            DeliveryReport delivery = deliver_fn(cycle);
            log.emit(clock, "feedback_delivered",
                     {{"team", team.team_id},
                      {"round", round},
                      {"messages", std::to_string(cycle.messages.size())},
                      {"all_ok", delivery.all_ok() ? "true" : "false"}});
            result.feedback = std::move(cycle);
            result.delivery = std::move(delivery);
        } catch (const std::exception& e) {
            // A failed feedback stage must not sink the round's score.
            result.ok = false;
            result.detail = std::string("feedback stage failed: ") + e.what();
            log.emit(clock, "feedback_failed",
                     {{"team", team.team_id}, {"round", round}, {"detail", e.what()}});
        }
        clock.sleep_until(deadline);
    }

    enter(RoundPhase::done);
    return result;
}

}  // namespace teampulse
