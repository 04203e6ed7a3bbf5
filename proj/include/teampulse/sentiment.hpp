#pragma once

#include <string>
#include <unordered_map>

namespace teampulse {

/// Word-valence lexicon in the published tab-separated format:
/// a "#valence <version>" header, then "word\tmean_valence" rows.
struct ValenceLexicon {
    std::unordered_map<std::string, double> valences;

    static ValenceLexicon load(const std::string& path);  // throws ConfigError
    bool contains(const std::string& lowered) const { return valences.contains(lowered); }
};

struct SentimentScore {
    double compound = 0.0;  // in [-1, 1]
    double positive = 0.0;
    double negative = 0.0;
    double neutral = 0.0;  // fractions sum to 1 when any token is scored
};

/// Rule-based sentiment: lexicon valences with negation flipping, booster
/// amplification, contrastive-conjunction reweighting, and punctuation/caps
/// emphasis; compound = s / sqrt(s^2 + alpha) with alpha = 15. Text with no
/// lexicon hits scores compound 0.
class SentimentAnalyzer {
public:
    explicit SentimentAnalyzer(ValenceLexicon lexicon) : lexicon_(std::move(lexicon)) {}

    SentimentScore score(const std::string& text) const;

private:
    ValenceLexicon lexicon_;
};

/// Convenience over a caller-held lexicon.
SentimentScore sentiment(const std::string& text, const ValenceLexicon& lexicon);

}  // namespace teampulse
