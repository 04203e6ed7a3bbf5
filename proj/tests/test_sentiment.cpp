#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"
#include "teampulse/sentiment.hpp"

using namespace teampulse;
using nlohmann::json;

namespace {

const ValenceLexicon& lexicon() {
    static ValenceLexicon lex = ValenceLexicon::load("data/lexicons/valence.tsv");
    return lex;
}

const SentimentAnalyzer& analyzer() {
    static SentimentAnalyzer a(lexicon());
    return a;
}

}  // namespace

TEST_CASE("compound scores match the frozen reference corpus within 1e-4") {
    std::ifstream in("tests/fixtures/sentiment_corpus.json");
    REQUIRE(in.good());
    json corpus = json::parse(in);
    REQUIRE(corpus.size() == 100);
    for (const auto& entry : corpus) {
        CAPTURE(entry["text"].get<std::string>());
        SentimentScore s = analyzer().score(entry["text"]);
        CHECK(s.compound == doctest::Approx(entry["compound"].get<double>()).epsilon(1e-4));
        CHECK(s.positive == doctest::Approx(entry["positive"].get<double>()).epsilon(1e-4));
        CHECK(s.negative == doctest::Approx(entry["negative"].get<double>()).epsilon(1e-4));
        CHECK(s.neutral == doctest::Approx(entry["neutral"].get<double>()).epsilon(1e-4));
    }
}

TEST_CASE("neutral-only text scores exactly zero") {
    SentimentScore s = analyzer().score("the chair is beside the table");
    CHECK(s.compound == 0.0);
    CHECK(s.positive == 0.0);
    CHECK(s.negative == 0.0);
    CHECK(s.neutral == 1.0);

    CHECK(analyzer().score("").compound == 0.0);
    CHECK(analyzer().score("   ").compound == 0.0);
}

TEST_CASE("negation flips polarity and boosters amplify") {
    double base = analyzer().score("this is good").compound;
    CHECK(base > 0.0);
    CHECK(analyzer().score("this is not good").compound < 0.0);
    CHECK(analyzer().score("this is very good").compound > base);
    CHECK(analyzer().score("this is slightly good").compound < base);
}

TEST_CASE("contrastive conjunction reweights toward the clause after 'but'") {
    double plain = analyzer().score("the food was good").compound;
    double but = analyzer().score("the food was good but the service was terrible").compound;
    CHECK(but < 0.0);
    CHECK(but < plain);
}

TEST_CASE("punctuation emphasis increases magnitude but saturates") {
    double one = analyzer().score("this is great!").compound;
    double four = analyzer().score("this is great!!!!").compound;
    double nine = analyzer().score("this is great!!!!!!!!!").compound;
    CHECK(one < four);
    CHECK(four == doctest::Approx(nine).epsilon(1e-12));
}

TEST_CASE("all-caps emphasis applies only in mixed-case text") {
    double mixed = analyzer().score("the plan is GREAT ok").compound;
    double plain = analyzer().score("the plan is great ok").compound;
    CHECK(mixed > plain);
    // Uniform shouting carries no differential signal.
    double shouting = analyzer().score("THE PLAN IS GREAT OK").compound;
    CHECK(shouting == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("fractions sum to one whenever any token is scored") {
    std::mt19937 rng(11);
    std::vector<std::string> vocab = {"good",  "bad",   "the",  "very", "not",
                                      "plan",  "happy", "sad",  "but",  "team",
                                      "great", "awful", "so",   "!",    "?"};
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> len(1, 18);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (!text.empty()) text += ' ';
            text += vocab[pick(rng)];
        }
        SentimentScore s = analyzer().score(text);
        CHECK(s.compound >= -1.0);
        CHECK(s.compound <= 1.0);
        double total = s.positive + s.negative + s.neutral;
        if (total != 0.0) CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("emoticons survive tokenization and score") {
    CHECK(analyzer().score("well :)").compound > 0.0);
    CHECK(analyzer().score("well :(").compound < 0.0);
}

TEST_CASE("lexicon loader rejects malformed files") {
    CHECK_THROWS_AS(ValenceLexicon::load("data/lexicons/function_words.tsv"), ConfigError);
    CHECK_THROWS_AS(ValenceLexicon::load("no/such/file.tsv"), ConfigError);
}
