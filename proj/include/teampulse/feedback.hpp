#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teampulse/llm.hpp"
#include "teampulse/metric_bundle.hpp"
#include "teampulse/promptkit.hpp"
#include "teampulse/transcript.hpp"

namespace teampulse {

/// Computes the full rule-based MetricBundle for a transcript. Pure
/// composition of the text-metric kernels; throws
/// DegenerateTranscriptError rather than returning a partial bundle.
MetricBundle analyze(const Transcript& t, const ValenceLexicon& valence,
                     const FunctionWordLexicon& function_words);

/// Canonical feedback section names, in the order the messages present them.
enum class Section { summary, strengths, improvements, actionable };
const char* to_string(Section s);

struct SectionReport {
    std::vector<std::pair<std::string, std::string>> sections;  // (heading, body)
    std::vector<std::string> violations;  // "missing: strengths", "duplicate: ..."
    bool valid() const { return violations.empty(); }
};

/// Heading-anchored split on the "> Heading" markdown contract, tolerant of
/// emphasis markers. Individual messages need all four sections; team
/// messages accept a merged improvements+actionable section. Violations are
/// data, not errors.
SectionReport validate_sections(const std::string& raw, Audience audience);

struct FeedbackMessage {
    Audience audience = Audience::team;
    std::string member_id;  // set for individual messages
    std::vector<std::pair<std::string, std::string>> sections;
    std::string raw_text;
    std::string request_tag;        // provenance: the CompletionResult it came from
    std::string backend_identity;   // provenance
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};

struct FeedbackConfig {
    PromptSpec team_spec = PromptSpec::production_team();
    PromptSpec individual_spec = PromptSpec::production_individual();
    JudgmentThresholds thresholds;
    BackendPolicy policy;
    std::string model_id;
    bool deliver_invalid = false;
};

struct FeedbackCycle {
    std::vector<FeedbackMessage> messages;          // team first, then members
    std::map<std::string, std::string> failures;    // request_tag -> reason
    std::map<std::string, std::uint64_t> prompt_fingerprints;  // request_tag -> hash
};

/// Renders one team prompt and one prompt per member, fans out to the
/// backend, and parses every completion into sections. Partial backend
/// failure is reported, not thrown; invalid messages keep their raw text.
FeedbackCycle generate_feedback(const Transcript& t, const MetricBundle& bundle,
                                const TemplateRegistry& registry, Backend& backend,
                                const FeedbackConfig& config);

/// Audit report for one cycle: metric values, prompt hashes, per-message
/// validity. Serialized JSON.
std::string cycle_report_json(const Transcript& t, const MetricBundle& bundle,
                              const FeedbackCycle& cycle);

}  // namespace teampulse
