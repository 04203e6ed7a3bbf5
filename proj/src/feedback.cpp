#include "teampulse/feedback.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

using nlohmann::json;

MetricBundle analyze(const Transcript& t, const ValenceLexicon& valence,
                     const FunctionWordLexicon& function_words) {
    if (t.messages.empty()) throw DegenerateTranscriptError("transcript has no messages");

    MetricBundle bundle;
    bundle.members = t.members;
    bundle.task_goal = t.task_goal;
    bundle.engagement = engagement(t);
    bundle.flow = flow_stats(t);

    SentimentAnalyzer analyzer(valence);
    const std::string team = team_text(t);
    bundle.team_sentiment = analyzer.score(team);
    FunctionWordProfile team_profile = function_word_profile(tokenize(team), function_words);

    for (const auto& member : t.members) {
        const std::string text = member_text(t, member.id);
        bundle.member_sentiment[member.id] = analyzer.score(text);
        bundle.member_lsm[member.id] =
            lsm(function_word_profile(tokenize(text), function_words), team_profile);
    }
    return bundle;
}

const char* to_string(Section s) {
    switch (s) {
        case Section::summary: return "summary";
        case Section::strengths: return "strengths";
        case Section::improvements: return "improvements";
        case Section::actionable: return "actionable";
    }
    return "?";
}

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// A heading is a line opening with '>' (the prompts' markdown contract),
// tolerating emphasis markers around it.
std::optional<std::string> heading_of(const std::string& line) {
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || line[i] != '>') return std::nullopt;
    ++i;
    std::string heading = line.substr(i);
    std::string cleaned;
    for (char c : heading)
        if (c != '*' && c != '_' && c != '#' && c != '>' && c != ':') cleaned += c;
    std::size_t begin = cleaned.find_first_not_of(" \t");
    if (begin == std::string::npos) return std::nullopt;
    std::size_t end = cleaned.find_last_not_of(" \t");
    return cleaned.substr(begin, end - begin + 1);
}

std::vector<Section> classify(const std::string& heading) {
    std::string h = lower(heading);
    std::vector<Section> kinds;
    if (h.find("summary") != std::string::npos || h.find("goal") != std::string::npos ||
        h.find("contribution") != std::string::npos)
        kinds.push_back(Section::summary);
    if (h.find("strength") != std::string::npos) kinds.push_back(Section::strengths);
    if (h.find("improvement") != std::string::npos) kinds.push_back(Section::improvements);
    if (h.find("actionable") != std::string::npos || h.find("steps") != std::string::npos)
        kinds.push_back(Section::actionable);
    return kinds;
}

}  // namespace

SectionReport validate_sections(const std::string& raw, Audience audience) {
    SectionReport report;
    std::istringstream in(raw);
    std::string line;
    std::string current_heading;
    std::string current_body;

    auto flush = [&] {
        if (!current_heading.empty())
            report.sections.emplace_back(current_heading, current_body);
        current_body.clear();
    };

    while (std::getline(in, line)) {
        if (auto heading = heading_of(line)) {
            flush();
            current_heading = *heading;
        } else if (!current_heading.empty()) {
            if (!current_body.empty()) current_body += '\n';
            current_body += line;
        }
    }
    flush();

    std::map<Section, int> counts;
    for (const auto& [heading, body] : report.sections) {
        // A merged heading counts toward every section it names, so its
        // duplicate accounting matches either the merged or split reading.
        for (Section s : classify(heading)) ++counts[s];
    }

    auto require = [&](Section s) {
        int n = counts.count(s) ? counts[s] : 0;
        if (n == 0)
            report.violations.push_back(std::string("missing: ") + to_string(s));
        else if (n > 1)
            report.violations.push_back(std::string("duplicate: ") + to_string(s));
    };

    if (audience == Audience::individual) {
        require(Section::summary);
        require(Section::strengths);
        require(Section::improvements);
        require(Section::actionable);
    } else if (audience == Audience::team) {
        require(Section::summary);
        require(Section::strengths);
        // Improvements and actionable steps may arrive merged or split.
        int improvement_like = counts[Section::improvements] + counts[Section::actionable];
        if (improvement_like == 0)
            report.violations.push_back("missing: improvements/actionable");
    }
    return report;
}

FeedbackCycle generate_feedback(const Transcript& t, const MetricBundle& bundle,
                                const TemplateRegistry& registry, Backend& backend,
                                const FeedbackConfig& config) {
    auto to_request = [&](const RenderedPrompt& prompt, const std::string& tag) {
        CompletionRequest req;
        req.system_text = prompt.system_text;
        req.user_text = prompt.user_text;
        req.model_id = config.model_id;
        req.request_tag = tag;
        return req;
    };

    CompletionRequest team_req = to_request(
        render_team_prompt(t, bundle, config.team_spec, registry, config.thresholds), "team");
    std::vector<CompletionRequest> member_reqs;
    for (const auto& member : t.members)
        member_reqs.push_back(to_request(
            render_individual_prompt(t, member.id, bundle, config.individual_spec, registry,
                                     config.thresholds),
            "member:" + member.id));

    FeedbackCycle cycle;
    cycle.prompt_fingerprints["team"] = request_fingerprint(team_req);
    for (const auto& req : member_reqs)
        cycle.prompt_fingerprints[req.request_tag] = request_fingerprint(req);

    FanOutReport report = fan_out(backend, team_req, member_reqs, config.policy);
    cycle.failures = report.failures;

    auto to_message = [&](const std::string& tag, const CompletionResult& result) {
        FeedbackMessage msg;
        msg.request_tag = tag;
        msg.backend_identity = result.backend_identity;
        msg.raw_text = result.text;
        if (tag == "team") {
            msg.audience = Audience::team;
        } else {
            msg.audience = Audience::individual;
            msg.member_id = tag.substr(std::string("member:").size());
        }
        SectionReport sections = validate_sections(result.text, msg.audience);
        msg.sections = sections.sections;
        msg.violations = sections.violations;
        return msg;
    };

    if (auto it = report.successes.find("team"); it != report.successes.end())
        cycle.messages.push_back(to_message("team", it->second));
    for (const auto& member : t.members) {
        std::string tag = "member:" + member.id;
        if (auto it = report.successes.find(tag); it != report.successes.end())
            cycle.messages.push_back(to_message(tag, it->second));
    }
    return cycle;
}

std::string cycle_report_json(const Transcript& t, const MetricBundle& bundle,
                              const FeedbackCycle& cycle) {
    json doc;
    doc["channel_id"] = t.channel_id;
    doc["task_goal"] = bundle.task_goal;
    doc["metrics"]["team_sentiment"] = bundle.team_sentiment.compound;
    doc["metrics"]["flow"] = {{"duration_minutes", bundle.flow.duration_minutes},
                              {"total_word_count", bundle.flow.total_word_count}};
    for (const auto& member : bundle.members) {
        json m;
        m["alias"] = member.alias;
        if (auto it = bundle.member_sentiment.find(member.id);
            it != bundle.member_sentiment.end())
            m["sentiment"] = it->second.compound;
        if (auto it = bundle.engagement.ratios.find(member.id);
            it != bundle.engagement.ratios.end())
            m["engagement_ratio"] = it->second;
        if (auto it = bundle.member_lsm.find(member.id); it != bundle.member_lsm.end())
            m["lsm_overall"] = it->second.overall;
        doc["metrics"]["members"][member.id] = m;
    }
    char hex[20];
    for (const auto& [tag, fp] : cycle.prompt_fingerprints) {
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fp));
        doc["prompt_hashes"][tag] = hex;
    }
    for (const auto& msg : cycle.messages)
        doc["messages"].push_back({{"request_tag", msg.request_tag},
                                   {"valid", msg.valid()},
                                   {"violations", msg.violations},
                                   {"backend", msg.backend_identity}});
    for (const auto& [tag, reason] : cycle.failures)
        doc["failures"][tag] = reason;
    return doc.dump(2);
}

}  // namespace teampulse
