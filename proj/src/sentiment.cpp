#include "teampulse/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>
#include <vector>

#include "teampulse/errors.hpp"

namespace teampulse {

namespace {

constexpr double kBoostIncr = 0.293;
constexpr double kBoostDecr = -0.293;
constexpr double kCapsBoost = 0.733;
constexpr double kNegationScalar = -0.74;
constexpr double kAlpha = 15.0;

const std::unordered_set<std::string>& negation_words() {
    static const std::unordered_set<std::string> words = {
        "aint",      "arent",     "cannot",   "cant",      "couldnt",  "darent",
        "didnt",     "doesnt",    "ain't",    "aren't",    "can't",    "couldn't",
        "daren't",   "didn't",    "doesn't",  "dont",      "hadnt",    "hasnt",
        "havent",    "isnt",      "mightnt",  "mustnt",    "neither",  "don't",
        "hadn't",    "hasn't",    "haven't",  "isn't",     "mightn't", "mustn't",
        "neednt",    "needn't",   "never",    "none",      "nope",     "nor",
        "not",       "nothing",   "nowhere",  "oughtnt",   "shant",    "shouldnt",
        "uhuh",      "wasnt",     "werent",   "oughtn't",  "shan't",   "shouldn't",
        "uh-uh",     "wasn't",    "weren't",  "without",   "wont",     "wouldnt",
        "won't",     "wouldn't",  "rarely",   "seldom",    "despite"};
    return words;
}

const std::unordered_map<std::string, double>& booster_dict() {
    static const std::unordered_map<std::string, double> boosters = {
        {"absolutely", kBoostIncr},   {"amazingly", kBoostIncr},
        {"awfully", kBoostIncr},      {"completely", kBoostIncr},
        {"considerably", kBoostIncr}, {"decidedly", kBoostIncr},
        {"deeply", kBoostIncr},       {"enormously", kBoostIncr},
        {"entirely", kBoostIncr},     {"especially", kBoostIncr},
        {"exceptionally", kBoostIncr},{"extremely", kBoostIncr},
        {"fabulously", kBoostIncr},   {"fully", kBoostIncr},
        {"greatly", kBoostIncr},      {"highly", kBoostIncr},
        {"hugely", kBoostIncr},       {"incredibly", kBoostIncr},
        {"intensely", kBoostIncr},    {"majorly", kBoostIncr},
        {"more", kBoostIncr},         {"most", kBoostIncr},
        {"particularly", kBoostIncr}, {"purely", kBoostIncr},
        {"quite", kBoostIncr},        {"really", kBoostIncr},
        {"remarkably", kBoostIncr},   {"so", kBoostIncr},
        {"substantially", kBoostIncr},{"thoroughly", kBoostIncr},
        {"totally", kBoostIncr},      {"tremendously", kBoostIncr},
        {"unbelievably", kBoostIncr}, {"unusually", kBoostIncr},
        {"utterly", kBoostIncr},      {"very", kBoostIncr},
        {"almost", kBoostDecr},       {"barely", kBoostDecr},
        {"hardly", kBoostDecr},       {"just enough", kBoostDecr},
        {"kind of", kBoostDecr},      {"kinda", kBoostDecr},
        {"kindof", kBoostDecr},       {"kind-of", kBoostDecr},
        {"less", kBoostDecr},         {"little", kBoostDecr},
        {"marginally", kBoostDecr},   {"occasionally", kBoostDecr},
        {"partly", kBoostDecr},       {"scarcely", kBoostDecr},
        {"slightly", kBoostDecr},     {"somewhat", kBoostDecr},
        {"sort of", kBoostDecr},      {"sorta", kBoostDecr},
        {"sortof", kBoostDecr},       {"sort-of", kBoostDecr}};
    return boosters;
}

const std::unordered_map<std::string, double>& special_idioms() {
    static const std::unordered_map<std::string, double> idioms = {
        {"the shit", 3.0},      {"the bomb", 3.0},   {"bad ass", 1.5},
        {"badass", 1.5},        {"bus stop", 0.0},   {"yeah right", -2.0},
        {"kiss of death", -1.5},{"to die for", 3.0}, {"beating heart", 3.1},
        {"broken heart", -2.9}};
    return idioms;
}

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_all_caps(const std::string& s) {
    bool has_alpha = false;
    for (unsigned char c : s) {
        if (std::isalpha(c)) {
            has_alpha = true;
            if (!std::isupper(c)) return false;
        }
    }
    return has_alpha;
}

// Strip leading/trailing punctuation; short residues (emoticons like ":)")
// keep the original token.
std::string strip_punct_if_word(const std::string& token) {
    std::size_t begin = 0, end = token.size();
    while (begin < end && std::ispunct(static_cast<unsigned char>(token[begin]))) ++begin;
    while (end > begin && std::ispunct(static_cast<unsigned char>(token[end - 1]))) --end;
    std::string stripped = token.substr(begin, end - begin);
    if (stripped.size() <= 2) return token;
    return stripped;
}

std::vector<std::string> words_and_emoticons(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                tokens.push_back(strip_punct_if_word(current));
                current.clear();
            }
        } else {
            current += c;
        }
    }
    if (!current.empty()) tokens.push_back(strip_punct_if_word(current));
    return tokens;
}

bool has_mixed_caps(const std::vector<std::string>& words) {
    int all_caps = 0;
    for (const auto& w : words)
        if (is_all_caps(w)) ++all_caps;
    int diff = static_cast<int>(words.size()) - all_caps;
    return diff > 0 && diff < static_cast<int>(words.size());
}

bool is_negation(const std::string& lowered) {
    if (negation_words().contains(lowered)) return true;
    return lowered.find("n't") != std::string::npos;
}

double booster_scalar(const std::string& word, double valence, bool mixed_caps) {
    auto it = booster_dict().find(to_lower(word));
    if (it == booster_dict().end()) return 0.0;
    double scalar = it->second;
    if (valence < 0.0) scalar = -scalar;
    if (is_all_caps(word) && mixed_caps) scalar += valence > 0.0 ? kCapsBoost : -kCapsBoost;
    return scalar;
}

double exclamation_emphasis(const std::string& text) {
    int count = static_cast<int>(std::count(text.begin(), text.end(), '!'));
    return std::min(count, 4) * 0.292;
}

double question_emphasis(const std::string& text) {
    int count = static_cast<int>(std::count(text.begin(), text.end(), '?'));
    if (count <= 1) return 0.0;
    return count <= 3 ? count * 0.18 : 0.96;
}

double apply_negation_window(double valence, const std::vector<std::string>& lowered,
                             std::size_t i, int back) {
    if (back == 0) {
        if (is_negation(lowered[i - 1])) valence *= kNegationScalar;
    } else if (back == 1) {
        if (lowered[i - 2] == "never" && (lowered[i - 1] == "so" || lowered[i - 1] == "this"))
            valence *= 1.25;
        else if (lowered[i - 2] == "without" && lowered[i - 1] == "doubt")
            ;  // intensifier phrase, leave valence as-is
        else if (is_negation(lowered[i - 2]))
            valence *= kNegationScalar;
    } else if (back == 2) {
        if (lowered[i - 3] == "never" &&
            (lowered[i - 2] == "so" || lowered[i - 2] == "this" || lowered[i - 1] == "so" ||
             lowered[i - 1] == "this"))
            valence *= 1.25;
        else if (lowered[i - 3] == "without" &&
                 (lowered[i - 2] == "doubt" || lowered[i - 1] == "doubt"))
            ;
        else if (is_negation(lowered[i - 3]))
            valence *= kNegationScalar;
    }
    return valence;
}

double apply_idioms(double valence, const std::vector<std::string>& lowered, std::size_t i) {
    const auto& idioms = special_idioms();
    auto lookup = [&](const std::string& seq) -> const double* {
        auto it = idioms.find(seq);
        return it == idioms.end() ? nullptr : &it->second;
    };

    std::vector<std::string> sequences;
    if (i >= 1) sequences.push_back(lowered[i - 1] + " " + lowered[i]);
    if (i >= 2) {
        sequences.push_back(lowered[i - 2] + " " + lowered[i - 1] + " " + lowered[i]);
        sequences.push_back(lowered[i - 2] + " " + lowered[i - 1]);
    }
    if (i >= 3) {
        sequences.push_back(lowered[i - 3] + " " + lowered[i - 2] + " " + lowered[i - 1]);
        sequences.push_back(lowered[i - 3] + " " + lowered[i - 2]);
    }
    if (i + 1 < lowered.size()) sequences.push_back(lowered[i] + " " + lowered[i + 1]);
    if (i + 2 < lowered.size())
        sequences.push_back(lowered[i] + " " + lowered[i + 1] + " " + lowered[i + 2]);

    for (const auto& seq : sequences)
        if (const double* v = lookup(seq)) return *v;

    // Bigram boosters two tokens back ("sort of", "kind of").
    if (i >= 2) {
        auto it = booster_dict().find(lowered[i - 2] + " " + lowered[i - 1]);
        if (it != booster_dict().end()) valence += it->second;
    }
    return valence;
}

double apply_least(double valence, const std::vector<std::string>& lowered, std::size_t i) {
    if (i == 0 || lowered[i - 1] != "least") return valence;
    if (i > 1 && (lowered[i - 2] == "at" || lowered[i - 2] == "very")) return valence;
    return valence * kNegationScalar;
}

void apply_but(const std::vector<std::string>& lowered, std::vector<double>& sentiments) {
    auto it = std::find(lowered.begin(), lowered.end(), "but");
    if (it == lowered.end()) return;
    std::size_t idx = static_cast<std::size_t>(it - lowered.begin());
    for (std::size_t i = 0; i < sentiments.size(); ++i) {
        if (i < idx)
            sentiments[i] *= 0.5;
        else if (i > idx)
            sentiments[i] *= 1.5;
    }
}

}  // namespace

ValenceLexicon ValenceLexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open valence lexicon: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#valence", 0) != 0)
        throw ConfigError("valence lexicon missing '#valence <version>' header: " + path);

    ValenceLexicon lex;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ConfigError("valence lexicon: row without tab: '" + line + "'");
        lex.valences[to_lower(line.substr(0, tab))] = std::stod(line.substr(tab + 1));
    }
    if (lex.valences.empty()) throw ConfigError("valence lexicon is empty: " + path);
    return lex;
}

SentimentScore SentimentAnalyzer::score(const std::string& text) const {
    SentimentScore result;
    std::vector<std::string> words = words_and_emoticons(text);
    if (words.empty()) {
        result.neutral = 1.0;
        return result;
    }

    std::vector<std::string> lowered;
    lowered.reserve(words.size());
    for (const auto& w : words) lowered.push_back(to_lower(w));

    const bool mixed_caps = has_mixed_caps(words);
    std::vector<double> sentiments;
    sentiments.reserve(words.size());

    for (std::size_t i = 0; i < words.size(); ++i) {
        if (booster_dict().contains(lowered[i]) ||
            (i + 1 < words.size() && lowered[i] == "kind" && lowered[i + 1] == "of")) {
            sentiments.push_back(0.0);
            continue;
        }
        auto lex_it = lexicon_.valences.find(lowered[i]);
        if (lex_it == lexicon_.valences.end()) {
            sentiments.push_back(0.0);
            continue;
        }

        double valence = lex_it->second;

        // "no" standing before a lexicon word acts as the negation, not as a
        // scored token of its own.
        if (lowered[i] == "no" && i + 1 < words.size() && lexicon_.contains(lowered[i + 1]))
            valence = 0.0;
        if ((i > 0 && lowered[i - 1] == "no") || (i > 1 && lowered[i - 2] == "no") ||
            (i > 2 && lowered[i - 3] == "no" &&
             (lowered[i - 1] == "or" || lowered[i - 1] == "nor")))
            valence = lex_it->second * kNegationScalar;

        if (is_all_caps(words[i]) && mixed_caps)
            valence += valence > 0.0 ? kCapsBoost : -kCapsBoost;

        for (int back = 0; back < 3; ++back) {
            if (i <= static_cast<std::size_t>(back)) continue;
            std::size_t prev = i - static_cast<std::size_t>(back) - 1;
            if (lexicon_.contains(lowered[prev])) continue;
            double scalar = booster_scalar(words[prev], valence, mixed_caps);
            if (back == 1 && scalar != 0.0) scalar *= 0.95;
            if (back == 2 && scalar != 0.0) scalar *= 0.90;
            valence += scalar;
            valence = apply_negation_window(valence, lowered, i, back);
            if (back == 2) valence = apply_idioms(valence, lowered, i);
        }
        valence = apply_least(valence, lowered, i);
        sentiments.push_back(valence);
    }

    apply_but(lowered, sentiments);

    double sum = 0.0;
    for (double s : sentiments) sum += s;
    const double punct = exclamation_emphasis(text) + question_emphasis(text);
    if (sum > 0.0)
        sum += punct;
    else if (sum < 0.0)
        sum -= punct;

    result.compound = std::clamp(sum / std::sqrt(sum * sum + kAlpha), -1.0, 1.0);

    double pos_sum = 0.0, neg_sum = 0.0;
    int neu_count = 0;
    for (double s : sentiments) {
        if (s > 0.0)
            pos_sum += s + 1.0;
        else if (s < 0.0)
            neg_sum += s - 1.0;
        else
            ++neu_count;
    }
    if (pos_sum > std::abs(neg_sum))
        pos_sum += punct;
    else if (pos_sum < std::abs(neg_sum))
        neg_sum -= punct;

    double total = pos_sum + std::abs(neg_sum) + neu_count;
    if (total > 0.0) {
        result.positive = std::abs(pos_sum / total);
        result.negative = std::abs(neg_sum / total);
        result.neutral = std::abs(neu_count / total);
    }
    return result;
}

SentimentScore sentiment(const std::string& text, const ValenceLexicon& lexicon) {
    return SentimentAnalyzer(lexicon).score(text);
}

}  // namespace teampulse
