#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace teampulse {

struct TaskDefinition {
    std::string task_id;
    std::string scenario;                     // free-text scenario description
    std::vector<std::string> items;           // 7 distinct item names, as presented
    std::vector<std::string> expert_ranking;  // permutation of items, best first
};

struct RankingSubmission {
    std::string task_id;
    std::vector<std::string> ranking;  // permutation of the task's items
    std::string submitted_at;          // RFC-3339, may be empty offline
};

/// Normalized distance score. Distances are exact integers; the percent is a
/// rational dist-pair, so the exhaustive property check stays drift-free.
struct TaskScore {
    std::int64_t dist_expert = 0;  // sum of absolute positional differences
    std::int64_t dist_worst = 0;   // same, against the inverse expert ranking

    double score_percent() const {
        return dist_worst == 0
                   ? 100.0
                   : 100.0 * static_cast<double>(dist_worst - dist_expert) /
                         static_cast<double>(dist_worst);
    }
};

/// The three built-in survival tasks with their expert solutions.
const std::vector<TaskDefinition>& builtin_tasks();

/// Built-in or file-loaded task by id. Throws NotFoundError.
const TaskDefinition& find_task(const std::string& task_id);

/// Loads custom task definitions from a JSON file (same schema as built-ins:
/// {task_id, scenario, items[], expert_ranking[]} objects).
std::vector<TaskDefinition> load_tasks(const std::string& path);

/// Case-insensitive validation of a raw item list against the task's items.
/// Violations (unknown/duplicate/missing items) are data, not errors.
struct SubmissionCheck {
    RankingSubmission submission;         // canonical item spellings, valid only if ok()
    std::vector<std::string> violations;  // "missing: <item>", "duplicate: <item>", ...
    bool ok() const { return violations.empty(); }
};
SubmissionCheck validate_submission(const TaskDefinition& task,
                                    const std::vector<std::string>& raw_items);

/// Positional-distance score against the expert and inverse-expert
/// rankings. Throws SchemaError for an invalid permutation (message lists
/// the duplicates/missing items).
TaskScore score_ranking(const TaskDefinition& task, const RankingSubmission& sub);

}  // namespace teampulse
