#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "teampulse/transcript.hpp"

namespace teampulse {

/// Lowercased word tokens; punctuation stripped except intra-word
/// apostrophes. Deterministic; empty text yields an empty sequence.
std::vector<std::string> tokenize(const std::string& text);

/// The nine closed-class word categories, in canonical order.
inline constexpr std::array<const char*, 9> kFunctionWordCategories = {
    "articles",           "personal_pronouns", "impersonal_pronouns",
    "prepositions",       "auxiliary_verbs",   "adverbs",
    "conjunctions",       "negations",         "quantifiers"};

struct FunctionWordLexicon {
    std::map<std::string, std::set<std::string>> categories;
    /// Words that appear in more than one category, flagged at load.
    std::vector<std::string> overlap_report;

    /// Loads the tab-separated lexicon file (header line names the format
    /// version, then "category\tword" rows). Throws ConfigError unless all
    /// nine categories are present and every entry is lowercase.
    static FunctionWordLexicon load(const std::string& path);
    static FunctionWordLexicon from_rows(
        const std::vector<std::pair<std::string, std::string>>& rows);
};

struct FunctionWordProfile {
    std::map<std::string, double> proportions;  // category -> [0,1]
    std::size_t total_tokens = 0;
};

/// Per-category proportion = matching tokens / max(1, total tokens).
FunctionWordProfile function_word_profile(const std::vector<std::string>& tokens,
                                          const FunctionWordLexicon& lexicon);

struct LsmResult {
    std::map<std::string, double> category_scores;  // each in [0,1]
    double overall = 0.0;                           // mean of category scores
    double epsilon = 0.0;
};

/// Per category: 1 - |P_U - P_T| / (P_U + P_T + epsilon); overall is the
/// arithmetic mean over the nine categories. A category absent from both
/// texts scores 1.0, exactly as the formula forces.
LsmResult lsm(const FunctionWordProfile& user, const FunctionWordProfile& team,
              double epsilon = 1e-6);

struct EngagementReport {
    std::map<std::string, std::size_t> word_counts;  // member -> words
    std::map<std::string, double> ratios;            // member -> [0,1], sum 1
    std::size_t team_total_words = 0;
};

/// Member words / team total words. Members with zero messages appear with
/// ratio 0. Throws DegenerateTranscriptError when the team total is zero.
EngagementReport engagement(const Transcript& t);

struct FlowStats {
    double duration_minutes = 0.0;                      // last ts - first ts
    std::map<std::string, std::size_t> turn_counts;     // maximal runs per sender
    std::map<std::string, std::size_t> message_counts;  // raw counts
    std::size_t total_word_count = 0;
};

/// A turn is a maximal run of consecutive messages by one sender.
FlowStats flow_stats(const Transcript& t);

}  // namespace teampulse
