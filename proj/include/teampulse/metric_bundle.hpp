#pragma once

#include <map>
#include <string>
#include <vector>

#include "teampulse/sentiment.hpp"
#include "teampulse/textmetrics.hpp"
#include "teampulse/transcript.hpp"

namespace teampulse {

/// Everything the feedback prompts consume for one team: rule-based metrics
/// for the team and each member, plus the task goal echo.
struct MetricBundle {
    std::vector<Member> members;
    std::string task_goal;
    SentimentScore team_sentiment;
    std::map<std::string, SentimentScore> member_sentiment;  // by member id
    EngagementReport engagement;
    std::map<std::string, LsmResult> member_lsm;  // member vs team, by id
    FlowStats flow;

    const Member* find_member(const std::string& id) const {
        for (const auto& m : members)
            if (m.id == id) return &m;
        return nullptr;
    }
};

}  // namespace teampulse
