#pragma once

#include <map>
#include <string>
#include <vector>

#include "teampulse/metric_bundle.hpp"
#include "teampulse/tasks.hpp"
#include "teampulse/transcript.hpp"

namespace teampulse {

enum class Audience { team, individual, ranking_eval };
enum class PromptLength { short_form, medium_form, long_form };  // ~100/200/300 words
enum class ContextLevel { low, medium, high };

const char* to_string(Audience a);
const char* to_string(PromptLength l);
const char* to_string(ContextLevel c);

/// The word limit carried by the rendering's length directive.
int word_limit(PromptLength length);

struct PromptSpec {
    Audience audience = Audience::team;
    PromptLength length = PromptLength::medium_form;
    ContextLevel context = ContextLevel::medium;
    std::string template_id;  // e.g. "team_long_medium"

    static PromptSpec team_cell(PromptLength length, ContextLevel context);
    static PromptSpec individual_cell(PromptLength length, ContextLevel context);
    static PromptSpec ranking_eval();

    /// Production defaults: long/medium-context for the team message,
    /// medium/medium-context for individual messages.
    static PromptSpec production_team();
    static PromptSpec production_individual();
};

/// The nine length x context grid cells for one audience, in prompt-id
/// order (1..9 = rows short/medium/long x columns low/medium/high).
std::vector<PromptSpec> grid(Audience audience);

enum class ContextBlockKind {
    transcript,
    metric_datum,
    few_shot_examples,
    explicit_judgment,
    task_goal,
    formatting_rules
};

struct ContextBlock {
    ContextBlockKind kind;
    std::string payload;
};

/// Block kinds a context level includes; low is a subset of medium is a
/// subset of high.
std::vector<ContextBlockKind> blocks_for(ContextLevel level);

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    std::map<std::string, std::string> substitution_report;  // placeholder -> source
};

/// Read-only template store: one file per audience x grid cell, plus the
/// system prompt and the ranking-evaluation prompt.
class TemplateRegistry {
public:
    /// Loads `<dir>/system.txt`, `<dir>/ranking_eval.txt`, and
    /// `<dir>/{team,individual}_<length>_<context>.txt` for all nine cells.
    /// Throws ConfigError on missing files.
    static TemplateRegistry load(const std::string& dir);

    const std::string& text(const std::string& template_id) const;  // throws NotFoundError
    const std::string& system_text() const { return system_; }

private:
    std::map<std::string, std::string> templates_;
    std::string system_;
};

/// Threshold-comparison rules for high-context explicit judgments.
struct JudgmentThresholds {
    double engagement_low = 0.20;     // ratio below -> low-participation judgment
    double sentiment_negative = 0.0;  // compound below -> negative-tone judgment
    double lsm_low = 0.5;             // overall below -> style-mismatch judgment
};

/// One declarative sentence per triggered rule; deterministic given
/// (bundle, thresholds).
std::vector<ContextBlock> judgment_synthesizer(const MetricBundle& bundle,
                                               const JudgmentThresholds& thresholds);

RenderedPrompt render_team_prompt(const Transcript& t, const MetricBundle& bundle,
                                  const PromptSpec& spec, const TemplateRegistry& registry,
                                  const JudgmentThresholds& thresholds = {});

RenderedPrompt render_individual_prompt(const Transcript& t, const std::string& member,
                                        const MetricBundle& bundle, const PromptSpec& spec,
                                        const TemplateRegistry& registry,
                                        const JudgmentThresholds& thresholds = {});

RenderedPrompt render_ranking_eval_prompt(const TaskDefinition& task,
                                          const RankingSubmission& submission,
                                          const TaskScore& score,
                                          const TemplateRegistry& registry);

/// Substitutes {Placeholder} markers. Throws RenderError (naming the
/// placeholder) if any marker remains unresolved.
std::string substitute(const std::string& template_text,
                       const std::map<std::string, std::string>& values,
                       std::map<std::string, std::string>* report = nullptr,
                       const std::map<std::string, std::string>& sources = {});

}  // namespace teampulse
