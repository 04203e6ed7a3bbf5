#include "teampulse/tasks.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

const std::vector<TaskDefinition>& builtin_tasks() {
    static const std::vector<TaskDefinition> tasks = {
        {"northern-canada",
         "You and your team have just survived the crash of a small plane. Both the pilot "
         "and co-pilot were killed in the crash. It is mid-January, and you are in Northern "
         "Canada. The daily temperature is 25 below zero, and the nighttime temperature is "
         "40 below zero. There is snow on the ground, and the countryside is wooded, with "
         "several creeks criss-crossing the area. The nearest town is 20 miles away. You are "
         "all dressed in city clothes appropriate for a business meeting. Rank the salvaged "
         "items by their importance for survival.",
         {"Ball of steel wool", "Small ax", "Loaded .45-caliber pistol",
          "Can of Crisco shortening", "Newspapers (one per person)",
          "Cigarette lighter (without fluid)", "Extra shirt and pants for each survivor"},
         {"Cigarette lighter (without fluid)", "Ball of steel wool",
          "Extra shirt and pants for each survivor", "Can of Crisco shortening", "Small ax",
          "Newspapers (one per person)", "Loaded .45-caliber pistol"}},
        {"open-ocean",
         "You and your team have chartered a yacht with an experienced skipper and a "
         "two-person crew. A fire breaks out, destroying much of the yacht and its contents. "
         "The yacht is slowly sinking, and your location is unclear. The skipper and crew "
         "were lost while trying to fight the fire. You are approximately 1000 miles "
         "southwest of the nearest landfall. Rank the salvaged items by their importance for "
         "survival.",
         {"Case of army rations", "2 boxes of chocolate bars", "5 gallon can of water",
          "20 square feet of opaque plastic sheeting", "Fishing kit", "Shaving mirror",
          "2 gallon can of oil/petrol mixture"},
         {"Shaving mirror", "2 gallon can of oil/petrol mixture", "5 gallon can of water",
          "Case of army rations", "20 square feet of opaque plastic sheeting",
          "2 boxes of chocolate bars", "Fishing kit"}},
        {"moon",
         "You are a member of a space crew originally scheduled to rendezvous with a mother "
         "ship on the lighted surface of the moon. However, due to mechanical difficulties, "
         "your ship was forced to land at a spot some 200 miles from the rendezvous point. "
         "During reentry and landing, much of the equipment aboard was damaged, and since "
         "survival depends on reaching the mother ship, the most critical items available "
         "must be chosen for the 200-mile trip. Rank the salvaged items by their importance "
         "for survival.",
         {"Box of matches", "Food concentrate", "50 feet of nylon rope", "Parachute silk",
          "Two 100 lb. tanks of oxygen", "Stellar map", "5 gallons of water"},
         {"Two 100 lb. tanks of oxygen", "5 gallons of water", "Stellar map",
          "Food concentrate", "50 feet of nylon rope", "Parachute silk", "Box of matches"}}};
    return tasks;
}

const TaskDefinition& find_task(const std::string& task_id) {
    for (const auto& t : builtin_tasks())
        if (t.task_id == task_id) return t;
    throw NotFoundError("unknown task '" + task_id + "'");
}

std::vector<TaskDefinition> load_tasks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open task file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    if (!doc.is_array()) throw SchemaError("task file must be a JSON array");

    std::vector<TaskDefinition> tasks;
    for (const auto& entry : doc) {
        TaskDefinition task;
        task.task_id = entry.at("task_id").get<std::string>();
        task.scenario = entry.at("scenario").get<std::string>();
        task.items = entry.at("items").get<std::vector<std::string>>();
        task.expert_ranking = entry.at("expert_ranking").get<std::vector<std::string>>();

        auto sorted_items = task.items;
        auto sorted_expert = task.expert_ranking;
        std::sort(sorted_items.begin(), sorted_items.end());
        std::sort(sorted_expert.begin(), sorted_expert.end());
        if (std::adjacent_find(sorted_items.begin(), sorted_items.end()) != sorted_items.end())
            throw SchemaError("task '" + task.task_id + "' has duplicate items");
        if (sorted_items != sorted_expert)
            throw SchemaError("task '" + task.task_id +
                              "' expert_ranking is not a permutation of items");
        tasks.push_back(std::move(task));
    }
    return tasks;
}

SubmissionCheck validate_submission(const TaskDefinition& task,
                                    const std::vector<std::string>& raw_items) {
    SubmissionCheck check;
    check.submission.task_id = task.task_id;

    std::map<std::string, std::string> canonical;  // lowercase -> as defined
    for (const auto& item : task.items) canonical[lower(item)] = item;

    std::map<std::string, int> seen;
    for (const auto& raw : raw_items) {
        auto it = canonical.find(lower(raw));
        if (it == canonical.end()) {
            check.violations.push_back("unknown: " + raw);
            continue;
        }
        if (++seen[it->second] > 1) {
            check.violations.push_back("duplicate: " + it->second);
            continue;
        }
        check.submission.ranking.push_back(it->second);
    }
    for (const auto& item : task.items)
        if (!seen.contains(item)) check.violations.push_back("missing: " + item);

    if (!check.ok()) check.submission.ranking.clear();
    return check;
}

TaskScore score_ranking(const TaskDefinition& task, const RankingSubmission& sub) {
    SubmissionCheck check = validate_submission(task, sub.ranking);
    if (!check.ok()) {
        std::ostringstream msg;
        msg << "invalid submission for task '" << task.task_id << "':";
        for (const auto& v : check.violations) msg << " [" << v << "]";
        throw SchemaError(msg.str());
    }
    const auto& ranking = check.submission.ranking;

    auto position_of = [](const std::vector<std::string>& order, const std::string& item) {
        return static_cast<std::int64_t>(
            std::find(order.begin(), order.end(), item) - order.begin());
    };

    std::vector<std::string> worst(task.expert_ranking.rbegin(), task.expert_ranking.rend());

    // dist_worst is the expert-to-inverse distance: the maximum attainable
    // positional distance, so score stays in [0, 100] for every permutation
    // and the inverse ranking scores exactly 0.
    TaskScore score;
    for (const auto& item : task.items) {
        std::int64_t team_pos = position_of(ranking, item);
        std::int64_t expert_pos = position_of(task.expert_ranking, item);
        score.dist_expert += std::llabs(team_pos - expert_pos);
        score.dist_worst += std::llabs(expert_pos - position_of(worst, item));
    }
    return score;
}

}  // namespace teampulse
