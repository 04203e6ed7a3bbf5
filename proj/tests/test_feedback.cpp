#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"
#include "teampulse/feedback.hpp"

using namespace teampulse;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Scenario {
    Transcript transcript;
    MetricBundle bundle;
    TemplateRegistry registry = TemplateRegistry::load("data/templates");
};

Scenario& scenario() {
    static Scenario s = [] {
        Scenario out;
        out.transcript =
            parse_transcript(read_file("tests/fixtures/transcript_trio.json"), {});
        auto valence = ValenceLexicon::load("data/lexicons/valence.tsv");
        auto funcs = FunctionWordLexicon::load("data/lexicons/function_words.tsv");
        out.bundle = analyze(out.transcript, valence, funcs);
        return out;
    }();
    return s;
}

/// Permanent failure for one request tag, valid mock output otherwise.
class OneBadTagBackend : public Backend {
public:
    explicit OneBadTagBackend(std::string bad) : bad_(std::move(bad)) {}
    CompletionResult complete(const CompletionRequest& req) override {
        if (req.request_tag == bad_)
            throw BackendError(BackendError::Kind::http, "injected permanent failure", 503);
        return mock_.complete(req);
    }
    std::string identity() const override { return "one-bad-tag"; }

private:
    std::string bad_;
    MockBackend mock_;
};

const std::string kValidIndividual =
    "> Summary of Contribution\nYou did the thing.\n"
    "> Key Strengths\n- focus\n"
    "> Areas for Improvement\n- pacing\n"
    "> Actionable Steps\n- try x\n";

}  // namespace

TEST_CASE("analyze composes per-member metrics keyed by member id") {
    auto& s = scenario();
    CHECK(s.bundle.members.size() == 3);
    CHECK(s.bundle.task_goal == s.transcript.task_goal);
    CHECK(s.bundle.member_sentiment.size() == 3);
    CHECK(s.bundle.member_lsm.size() == 3);
    for (const auto& [id, lsm] : s.bundle.member_lsm) {
        CHECK(lsm.overall >= 0.0);
        CHECK(lsm.overall <= 1.0);
    }
    CHECK(s.bundle.team_sentiment.compound > 0.0);  // friendly fixture
}

TEST_CASE("section validation accepts the full four-section individual form") {
    auto report = validate_sections(kValidIndividual, Audience::individual);
    CHECK(report.valid());
    REQUIRE(report.sections.size() == 4);
    CHECK(report.sections[0].first == "Summary of Contribution");
    CHECK(report.sections[0].second == "You did the thing.");
}

TEST_CASE("missing and duplicated sections are reported as violations") {
    std::string missing =
        "> Summary of Contribution\nx\n> Key Strengths\n- y\n> Actionable Steps\n- z\n";
    auto r1 = validate_sections(missing, Audience::individual);
    CHECK_FALSE(r1.valid());
    CHECK(std::find(r1.violations.begin(), r1.violations.end(),
                    "missing: improvements") != r1.violations.end());

    std::string duplicated = kValidIndividual + "> Key Strengths\n- again\n";
    auto r2 = validate_sections(duplicated, Audience::individual);
    CHECK_FALSE(r2.valid());
    CHECK(std::find(r2.violations.begin(), r2.violations.end(),
                    "duplicate: strengths") != r2.violations.end());
}

TEST_CASE("team messages accept merged improvement and actionable sections") {
    std::string merged =
        "> Summary of Goals and Contributions\nx\n"
        "> Key Strengths\n- y\n"
        "> Areas for Improvement and Actionable Steps\n- z\n";
    CHECK(validate_sections(merged, Audience::team).valid());
}

TEST_CASE("heading matching tolerates emphasis and colon decoration") {
    std::string decorated =
        "> **Summary of Contribution:**\nx\n"
        "> *Key Strengths*\n- y\n"
        "> __Areas for Improvement__\n- z\n"
        "> Actionable Steps:\n- w\n";
    auto report = validate_sections(decorated, Audience::individual);
    CHECK(report.valid());
}

TEST_CASE("unheaded text fails validation but keeps the raw body") {
    auto report = validate_sections("just plain prose, no headings", Audience::team);
    CHECK_FALSE(report.valid());
    CHECK(report.sections.empty());
}

TEST_CASE("generate_feedback produces one team and three member messages") {
    auto& s = scenario();
    MockBackend backend;
    FeedbackConfig config;
    config.model_id = "test-model";

    FeedbackCycle cycle = generate_feedback(s.transcript, s.bundle, s.registry, backend, config);
    CHECK(cycle.failures.empty());
    REQUIRE(cycle.messages.size() == 4);
    CHECK(cycle.messages[0].audience == Audience::team);
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(cycle.messages[i].audience == Audience::individual);
        CHECK_FALSE(cycle.messages[i].member_id.empty());
    }
    for (const auto& m : cycle.messages) {
        CHECK(m.valid());
        CHECK(m.backend_identity == "mock");
    }
    CHECK(cycle.prompt_fingerprints.size() == 4);

    // Determinism: same inputs, same raw texts.
    FeedbackCycle again = generate_feedback(s.transcript, s.bundle, s.registry, backend, config);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(again.messages[i].raw_text == cycle.messages[i].raw_text);
}

TEST_CASE("a permanently failing member request degrades to three messages") {
    auto& s = scenario();
    OneBadTagBackend backend("member:u-ben");
    FeedbackConfig config;
    config.policy.retries = 1;
    config.policy.backoff_base = std::chrono::milliseconds(1);

    FeedbackCycle cycle = generate_feedback(s.transcript, s.bundle, s.registry, backend, config);
    CHECK(cycle.messages.size() == 3);
    REQUIRE(cycle.failures.size() == 1);
    CHECK(cycle.failures.begin()->first == "member:u-ben");
    for (const auto& m : cycle.messages) CHECK(m.member_id != "u-ben");
}

TEST_CASE("cycle report is schema-stable JSON with metrics and hashes") {
    auto& s = scenario();
    MockBackend backend;
    FeedbackConfig config;
    FeedbackCycle cycle = generate_feedback(s.transcript, s.bundle, s.registry, backend, config);

    json report = json::parse(cycle_report_json(s.transcript, s.bundle, cycle));
    CHECK(report.contains("channel_id"));
    CHECK(report.contains("metrics"));
    CHECK(report["metrics"].contains("team_sentiment"));
    CHECK(report.contains("messages"));
    CHECK(report["messages"].size() == 4);
    for (const auto& m : report["messages"]) {
        CHECK(m.contains("request_tag"));
        CHECK(m.contains("valid"));
        CHECK(m.contains("backend"));
    }
    CHECK(report.contains("prompt_hashes"));
    CHECK(report["prompt_hashes"].size() == 4);
}
