#include "teampulse/promptkit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "teampulse/errors.hpp"

namespace teampulse {

namespace fs = std::filesystem;

const char* to_string(Audience a) {
    switch (a) {
        case Audience::team: return "team";
        case Audience::individual: return "individual";
        case Audience::ranking_eval: return "ranking-eval";
    }
    return "?";
}

const char* to_string(PromptLength l) {
    switch (l) {
        case PromptLength::short_form: return "short";
        case PromptLength::medium_form: return "medium";
        case PromptLength::long_form: return "long";
    }
    return "?";
}

const char* to_string(ContextLevel c) {
    switch (c) {
        case ContextLevel::low: return "low";
        case ContextLevel::medium: return "medium";
        case ContextLevel::high: return "high";
    }
    return "?";
}

int word_limit(PromptLength length) {
    switch (length) {
        case PromptLength::short_form: return 100;
        case PromptLength::medium_form: return 200;
        case PromptLength::long_form: return 300;
    }
    return 200;
}

namespace {

std::string cell_id(Audience a, PromptLength l, ContextLevel c) {
    return std::string(to_string(a)) + "_" + to_string(l) + "_" + to_string(c);
}

std::string format_2dp(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string format_percent(double ratio) {
    return std::to_string(static_cast<int>(std::lround(ratio * 100.0)));
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += sep;
        out += item;
    }
    return out;
}

}  // namespace

PromptSpec PromptSpec::team_cell(PromptLength length, ContextLevel context) {
    return {Audience::team, length, context, cell_id(Audience::team, length, context)};
}

PromptSpec PromptSpec::individual_cell(PromptLength length, ContextLevel context) {
    return {Audience::individual, length, context,
            cell_id(Audience::individual, length, context)};
}

PromptSpec PromptSpec::ranking_eval() {
    return {Audience::ranking_eval, PromptLength::medium_form, ContextLevel::medium,
            "ranking_eval"};
}

PromptSpec PromptSpec::production_team() {
    return team_cell(PromptLength::long_form, ContextLevel::medium);
}

PromptSpec PromptSpec::production_individual() {
    return individual_cell(PromptLength::medium_form, ContextLevel::medium);
}

std::vector<PromptSpec> grid(Audience audience) {
    std::vector<PromptSpec> cells;
    for (PromptLength l :
         {PromptLength::short_form, PromptLength::medium_form, PromptLength::long_form})
        for (ContextLevel c : {ContextLevel::low, ContextLevel::medium, ContextLevel::high})
            cells.push_back(audience == Audience::team ? PromptSpec::team_cell(l, c)
                                                       : PromptSpec::individual_cell(l, c));
    return cells;
}

std::vector<ContextBlockKind> blocks_for(ContextLevel level) {
    std::vector<ContextBlockKind> kinds = {ContextBlockKind::transcript,
                                           ContextBlockKind::task_goal,
                                           ContextBlockKind::formatting_rules};
    if (level == ContextLevel::low) return kinds;
    kinds.push_back(ContextBlockKind::metric_datum);
    kinds.push_back(ContextBlockKind::few_shot_examples);
    if (level == ContextLevel::medium) return kinds;
    kinds.push_back(ContextBlockKind::explicit_judgment);
    return kinds;
}

TemplateRegistry TemplateRegistry::load(const std::string& dir) {
    auto read_file = [&](const std::string& name) {
        fs::path path = fs::path(dir) / name;
        std::ifstream in(path);
        if (!in) throw ConfigError("missing prompt template: " + path.string());
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };

    TemplateRegistry reg;
    reg.system_ = read_file("system.txt");
    reg.templates_["ranking_eval"] = read_file("ranking_eval.txt");
    for (Audience a : {Audience::team, Audience::individual})
        for (const auto& spec : grid(a))
            reg.templates_[spec.template_id] = read_file(spec.template_id + ".txt");
    return reg;
}

const std::string& TemplateRegistry::text(const std::string& template_id) const {
    auto it = templates_.find(template_id);
    if (it == templates_.end()) throw NotFoundError("unknown template '" + template_id + "'");
    return it->second;
}

std::string substitute(const std::string& template_text,
                       const std::map<std::string, std::string>& values,
                       std::map<std::string, std::string>* report,
                       const std::map<std::string, std::string>& sources) {
    std::string out;
    out.reserve(template_text.size());
    std::size_t i = 0;
    while (i < template_text.size()) {
        char c = template_text[i];
        if (c != '{') {
            out += c;
            ++i;
            continue;
        }
        std::size_t close = template_text.find('}', i);
        if (close == std::string::npos) {
            out += template_text.substr(i);
            break;
        }
        std::string name = template_text.substr(i + 1, close - i - 1);
        auto it = values.find(name);
        if (it == values.end())
            throw RenderError("unresolved placeholder '{" + name + "}'", name);
        out += it->second;
        if (report) {
            auto src = sources.find(name);
            (*report)[name] = src != sources.end() ? src->second : "caller";
        }
        i = close + 1;
    }
    return out;
}

std::vector<ContextBlock> judgment_synthesizer(const MetricBundle& bundle,
                                               const JudgmentThresholds& thresholds) {
    std::vector<ContextBlock> judgments;
    auto alias_of = [&](const std::string& id) {
        const Member* m = bundle.find_member(id);
        return m ? m->alias : id;
    };

    for (const auto& member : bundle.members) {
        auto it = bundle.engagement.ratios.find(member.id);
        if (it != bundle.engagement.ratios.end() && it->second < thresholds.engagement_low)
            judgments.push_back(
                {ContextBlockKind::explicit_judgment,
                 "Engagement was imbalanced: " + alias_of(member.id) + " contributed " +
                     format_percent(it->second) + "% of the words."});
    }
    if (bundle.team_sentiment.compound < thresholds.sentiment_negative)
        judgments.push_back({ContextBlockKind::explicit_judgment,
                             "The overall tone of the conversation was negative (compound "
                             "sentiment " +
                                 format_2dp(bundle.team_sentiment.compound) + ")."});
    for (const auto& member : bundle.members) {
        auto it = bundle.member_sentiment.find(member.id);
        if (it != bundle.member_sentiment.end() &&
            it->second.compound < thresholds.sentiment_negative)
            judgments.push_back({ContextBlockKind::explicit_judgment,
                                 alias_of(member.id) + "'s messages carried a negative tone "
                                 "(compound sentiment " +
                                     format_2dp(it->second.compound) + ")."});
    }
    for (const auto& member : bundle.members) {
        auto it = bundle.member_lsm.find(member.id);
        if (it != bundle.member_lsm.end() && it->second.overall < thresholds.lsm_low)
            judgments.push_back(
                {ContextBlockKind::explicit_judgment,
                 alias_of(member.id) + "'s language style diverged from the team's (LSM " +
                     format_2dp(it->second.overall) + ")."});
    }
    return judgments;
}

namespace {

std::string judgments_text(const MetricBundle& bundle, const JudgmentThresholds& thresholds) {
    std::vector<ContextBlock> judgments = judgment_synthesizer(bundle, thresholds);
    if (judgments.empty())
        return "- No threshold rule fired; all monitored metrics are within bounds.";
    std::string out;
    for (const auto& j : judgments) {
        if (!out.empty()) out += '\n';
        out += "- " + j.payload;
    }
    return out;
}

}  // namespace

RenderedPrompt render_team_prompt(const Transcript& t, const MetricBundle& bundle,
                                  const PromptSpec& spec, const TemplateRegistry& registry,
                                  const JudgmentThresholds& thresholds) {
    if (spec.audience != Audience::team)
        throw ConfigError("render_team_prompt requires a team PromptSpec");

    std::map<std::string, std::string> values = {
        {"TeamConversation", format_conversation(t)},
        {"TeamTask", t.task_goal},
    };
    std::map<std::string, std::string> sources = {
        {"TeamConversation", "transcript"},
        {"TeamTask", "transcript.task_goal"},
    };
    if (spec.context != ContextLevel::low) {
        values["TeamSentiment"] = format_2dp(bundle.team_sentiment.compound);
        values["TotalTeamMember"] = std::to_string(t.members.size());
        sources["TeamSentiment"] = "metrics.team_sentiment.compound";
        sources["TotalTeamMember"] = "transcript.members";
    }
    if (spec.context == ContextLevel::high) {
        values["ExplicitJudgments"] = judgments_text(bundle, thresholds);
        sources["ExplicitJudgments"] = "judgment_synthesizer";
    }

    RenderedPrompt prompt;
    prompt.system_text = registry.system_text();
    prompt.user_text = substitute(registry.text(spec.template_id), values,
                                  &prompt.substitution_report, sources);
    return prompt;
}

RenderedPrompt render_individual_prompt(const Transcript& t, const std::string& member,
                                        const MetricBundle& bundle, const PromptSpec& spec,
                                        const TemplateRegistry& registry,
                                        const JudgmentThresholds& thresholds) {
    if (spec.audience != Audience::individual)
        throw ConfigError("render_individual_prompt requires an individual PromptSpec");
    const Member* who = t.find_member(member);
    if (!who) throw NotFoundError("unknown member '" + member + "'");

    std::map<std::string, std::string> values = {
        {"Speaker", who->alias},
        {"TeamMemberName", who->alias},
        {"TeamTask", t.task_goal},
        {"TeamConversation", format_conversation(t)},
        {"TeamMemberScript", format_member_script(t, member)},
    };
    std::map<std::string, std::string> sources = {
        {"Speaker", "transcript.members"},
        {"TeamMemberName", "transcript.members"},
        {"TeamTask", "transcript.task_goal"},
        {"TeamConversation", "transcript"},
        {"TeamMemberScript", "transcript.member_view"},
    };
    if (spec.context != ContextLevel::low) {
        values["TeamSentiment"] = format_2dp(bundle.team_sentiment.compound);
        sources["TeamSentiment"] = "metrics.team_sentiment.compound";
        auto sent = bundle.member_sentiment.find(member);
        values["MemberSentiment"] =
            format_2dp(sent != bundle.member_sentiment.end() ? sent->second.compound : 0.0);
        sources["MemberSentiment"] = "metrics.member_sentiment.compound";
        auto ratio = bundle.engagement.ratios.find(member);
        values["MemberWordsSpokenPercentage"] =
            format_percent(ratio != bundle.engagement.ratios.end() ? ratio->second : 0.0);
        sources["MemberWordsSpokenPercentage"] = "metrics.engagement.ratio";
        auto style = bundle.member_lsm.find(member);
        values["LanguageStyleMatching"] =
            format_2dp(style != bundle.member_lsm.end() ? style->second.overall : 0.0);
        sources["LanguageStyleMatching"] = "metrics.lsm.overall";
    }
    if (spec.context == ContextLevel::high) {
        values["ExplicitJudgments"] = judgments_text(bundle, thresholds);
        sources["ExplicitJudgments"] = "judgment_synthesizer";
    }

    RenderedPrompt prompt;
    prompt.system_text = registry.system_text();
    prompt.user_text = substitute(registry.text(spec.template_id), values,
                                  &prompt.substitution_report, sources);
    return prompt;
}

RenderedPrompt render_ranking_eval_prompt(const TaskDefinition& task,
                                          const RankingSubmission& submission,
                                          const TaskScore& score,
                                          const TemplateRegistry& registry) {
    char score_buf[32];
    std::snprintf(score_buf, sizeof(score_buf), "%.1f", score.score_percent());

    std::map<std::string, std::string> values = {
        {"TeamTask", task.scenario},
        {"Ranking", join(submission.ranking, ", ")},
        {"Score", score_buf},
        {"ExpertRanking", join(task.expert_ranking, ", ")},
    };
    std::map<std::string, std::string> sources = {
        {"TeamTask", "task.scenario"},
        {"Ranking", "submission"},
        {"Score", "score_ranking"},
        {"ExpertRanking", "task.expert_ranking"},
    };

    RenderedPrompt prompt;
    prompt.system_text = registry.system_text();
    prompt.user_text =
        substitute(registry.text("ranking_eval"), values, &prompt.substitution_report, sources);
    return prompt;
}

}  // namespace teampulse
