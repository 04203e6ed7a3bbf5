#include "teampulse/textmetrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "teampulse/errors.hpp"

namespace teampulse {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    auto is_word_char = [](unsigned char c) { return std::isalnum(c) != 0; };

    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_char(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (c == '\'' && !current.empty() && i + 1 < text.size() &&
                   is_word_char(static_cast<unsigned char>(text[i + 1]))) {
            current += '\'';  // intra-word apostrophe: don't, we're
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

FunctionWordLexicon FunctionWordLexicon::from_rows(
    const std::vector<std::pair<std::string, std::string>>& rows) {
    FunctionWordLexicon lex;
    for (const char* cat : kFunctionWordCategories) lex.categories[cat];

    std::map<std::string, std::vector<std::string>> word_cats;
    for (const auto& [cat, word] : rows) {
        if (!lex.categories.contains(cat))
            throw ConfigError("function-word lexicon: unknown category '" + cat + "'");
        for (char c : word)
            if (std::isupper(static_cast<unsigned char>(c)))
                throw ConfigError("function-word lexicon: entry '" + word + "' is not lowercase");
        if (lex.categories[cat].insert(word).second) word_cats[word].push_back(cat);
    }
    for (const char* cat : kFunctionWordCategories)
        if (lex.categories[cat].empty())
            throw ConfigError(std::string("function-word lexicon: category '") + cat +
                              "' has no entries");
    for (const auto& [word, cats] : word_cats) {
        if (cats.size() < 2) continue;
        std::string line = word + ":";
        for (const auto& c : cats) line += " " + c;
        lex.overlap_report.push_back(line);
    }
    return lex;
}

FunctionWordLexicon FunctionWordLexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open function-word lexicon: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#funcwords", 0) != 0)
        throw ConfigError("function-word lexicon missing '#funcwords <version>' header: " + path);

    std::vector<std::pair<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ConfigError("function-word lexicon: row without tab: '" + line + "'");
        rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return from_rows(rows);
}

FunctionWordProfile function_word_profile(const std::vector<std::string>& tokens,
                                          const FunctionWordLexicon& lexicon) {
    FunctionWordProfile profile;
    profile.total_tokens = tokens.size();
    const double denom = static_cast<double>(std::max<std::size_t>(1, tokens.size()));
    for (const auto& [cat, words] : lexicon.categories) {
        std::size_t hits = 0;
        for (const auto& tok : tokens)
            if (words.contains(tok)) ++hits;
        profile.proportions[cat] = static_cast<double>(hits) / denom;
    }
    return profile;
}

LsmResult lsm(const FunctionWordProfile& user, const FunctionWordProfile& team, double epsilon) {
    LsmResult result;
    result.epsilon = epsilon;
    double sum = 0.0;
    for (const char* cat : kFunctionWordCategories) {
        double pu = user.proportions.count(cat) ? user.proportions.at(cat) : 0.0;
        double pt = team.proportions.count(cat) ? team.proportions.at(cat) : 0.0;
        double score = 1.0 - std::abs(pu - pt) / (pu + pt + epsilon);
        result.category_scores[cat] = score;
        sum += score;
    }
    result.overall = sum / static_cast<double>(kFunctionWordCategories.size());
    return result;
}

EngagementReport engagement(const Transcript& t) {
    EngagementReport report;
    for (const auto& m : t.members) report.word_counts[m.id] = 0;
    for (const auto& msg : t.messages)
        report.word_counts[msg.sender_id] += tokenize(msg.text).size();
    for (const auto& [id, count] : report.word_counts) report.team_total_words += count;
    if (report.team_total_words == 0)
        throw DegenerateTranscriptError("transcript contains zero words");
    for (const auto& [id, count] : report.word_counts)
        report.ratios[id] =
            static_cast<double>(count) / static_cast<double>(report.team_total_words);
    return report;
}

FlowStats flow_stats(const Transcript& t) {
    FlowStats stats;
    if (t.messages.empty()) return stats;

    auto span = t.messages.back().timestamp - t.messages.front().timestamp;
    stats.duration_minutes =
        std::chrono::duration_cast<std::chrono::duration<double, std::ratio<60>>>(span).count();

    const std::string* prev_sender = nullptr;
    for (const auto& msg : t.messages) {
        ++stats.message_counts[msg.sender_id];
        stats.total_word_count += tokenize(msg.text).size();
        if (!prev_sender || *prev_sender != msg.sender_id) ++stats.turn_counts[msg.sender_id];
        prev_sender = &msg.sender_id;
    }
    for (const auto& m : t.members) {
        stats.turn_counts.try_emplace(m.id, 0);
        stats.message_counts.try_emplace(m.id, 0);
    }
    return stats;
}

}  // namespace teampulse
