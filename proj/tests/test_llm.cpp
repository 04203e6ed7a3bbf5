#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>

#include "doctest.h"
#include "teampulse/errors.hpp"
#include "teampulse/llm.hpp"

using namespace teampulse;
namespace fs = std::filesystem;

namespace {

CompletionRequest make_request(const std::string& tag, const std::string& user_text) {
    CompletionRequest req;
    req.system_text = "system";
    req.user_text = user_text;
    req.model_id = "test-model";
    req.request_tag = tag;
    return req;
}

/// Fails the first `failures` calls with the given kind, then succeeds.
class FlakyBackend : public Backend {
public:
    FlakyBackend(int failures, BackendError::Kind kind) : failures_(failures), kind_(kind) {}
    CompletionResult complete(const CompletionRequest& req) override {
        calls_.fetch_add(1);
        if (failures_-- > 0) throw BackendError(kind_, "injected failure");
        CompletionResult r;
        r.text = "> Summary\nok for " + req.request_tag;
        r.backend_identity = identity();
        return r;
    }
    std::string identity() const override { return "flaky"; }
    int calls() const { return calls_.load(); }

private:
    std::atomic<int> failures_;
    BackendError::Kind kind_;
    std::atomic<int> calls_{0};
};

/// Fails permanently for one tag, succeeds for everything else.
class SelectiveBackend : public Backend {
public:
    explicit SelectiveBackend(std::string bad_tag) : bad_tag_(std::move(bad_tag)) {}
    CompletionResult complete(const CompletionRequest& req) override {
        if (req.request_tag == bad_tag_)
            throw BackendError(BackendError::Kind::http, "permanent 500", 500);
        CompletionResult r;
        r.text = "ok " + req.request_tag;
        r.backend_identity = identity();
        return r;
    }
    std::string identity() const override { return "selective"; }

private:
    std::string bad_tag_;
};

/// Records the order in which requests are observed.
class OrderingBackend : public Backend {
public:
    CompletionResult complete(const CompletionRequest& req) override {
        {
            std::lock_guard<std::mutex> lock(mu_);
            order.push_back(req.request_tag);
        }
        CompletionResult r;
        r.text = "ok";
        r.backend_identity = identity();
        return r;
    }
    std::string identity() const override { return "ordering"; }
    std::vector<std::string> order;

private:
    std::mutex mu_;
};

}  // namespace

TEST_CASE("fingerprints are stable and depend on every text field") {
    auto a = make_request("team", "hello");
    CHECK(request_fingerprint(a) == request_fingerprint(a));
    auto b = make_request("team", "hello!");
    CHECK(request_fingerprint(a) != request_fingerprint(b));
    auto c = a;
    c.system_text = "other system";
    CHECK(request_fingerprint(a) != request_fingerprint(c));
}

TEST_CASE("mock backend is deterministic and echoes prompt data") {
    MockBackend mock;
    auto req = make_request("team", "Team Task: rank the items\nmore text");
    auto first = mock.complete(req);
    auto second = mock.complete(req);
    CHECK(first.text == second.text);
    CHECK(first.text.find("rank the items") != std::string::npos);
    CHECK(first.text.find("> Key Strengths") != std::string::npos);

    MockBackend other(99);
    CHECK(other.complete(req).text != first.text);  // seed shifts the trace
}

TEST_CASE("policy retries timeouts and http errors, then rethrows") {
    BackendPolicy policy;
    policy.retries = 2;
    policy.backoff_base = std::chrono::milliseconds(1);

    FlakyBackend recovers(2, BackendError::Kind::timeout);
    auto result = complete_with_policy(recovers, make_request("t", "x"), policy);
    CHECK(result.attempts == 3);
    CHECK(recovers.calls() == 3);

    FlakyBackend hopeless(10, BackendError::Kind::http);
    CHECK_THROWS_AS(complete_with_policy(hopeless, make_request("t", "x"), policy),
                    BackendError);
    CHECK(hopeless.calls() == 3);  // initial try + 2 retries
}

TEST_CASE("malformed responses and missing credentials are not retried") {
    BackendPolicy policy;
    policy.retries = 3;
    policy.backoff_base = std::chrono::milliseconds(1);
    FlakyBackend malformed(10, BackendError::Kind::malformed_response);
    CHECK_THROWS_AS(complete_with_policy(malformed, make_request("t", "x"), policy),
                    BackendError);
    CHECK(malformed.calls() == 1);
}

TEST_CASE("fan-out returns every success and reports failures by tag") {
    SelectiveBackend backend("member:u-ben");
    BackendPolicy policy;
    policy.retries = 0;
    policy.backoff_base = std::chrono::milliseconds(1);

    std::vector<CompletionRequest> members = {make_request("member:u-ada", "a"),
                                              make_request("member:u-ben", "b"),
                                              make_request("member:u-cho", "c")};
    FanOutReport report = fan_out(backend, make_request("team", "t"), members, policy);
    CHECK_FALSE(report.all_succeeded());
    CHECK(report.successes.size() == 3);
    CHECK(report.successes.contains("team"));
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures.begin()->first == "member:u-ben");
    CHECK(report.failures.begin()->second.find("500") != std::string::npos);
}

TEST_CASE("concurrency limit 1 keeps fan-out strictly sequential") {
    OrderingBackend backend;
    BackendPolicy policy;
    policy.max_concurrency = 1;
    std::vector<CompletionRequest> members = {make_request("member:1", "a"),
                                              make_request("member:2", "b")};
    fan_out(backend, make_request("team", "t"), members, policy);
    std::vector<std::string> expected = {"team", "member:1", "member:2"};
    CHECK(backend.order == expected);
}

TEST_CASE("recording then replaying reproduces the completion bit-for-bit") {
    fs::path dir = fs::temp_directory_path() / "teampulse_replay_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto inner = std::make_shared<MockBackend>();
    RecordingBackend recorder(inner, dir.string());
    auto req = make_request("team", "Team Task: record me");
    auto recorded = recorder.complete(req);

    ReplayBackend replay(dir.string());
    auto replayed = replay.complete(req);
    CHECK(replayed.text == recorded.text);

    auto unseen = make_request("team", "never recorded");
    CHECK_THROWS_AS(replay.complete(unseen), BackendError);
    fs::remove_all(dir);
}

TEST_CASE("http backend refuses to start without its credential") {
    HttpBackendConfig cfg;
    cfg.endpoint = "https://example.invalid/v1/chat/completions";
    cfg.model_id = "m";
    cfg.credential_env = "TEAMPULSE_TEST_UNSET_KEY";
    ::unsetenv("TEAMPULSE_TEST_UNSET_KEY");
    HttpBackend backend(cfg);
    try {
        backend.complete(make_request("t", "x"));
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.kind() == BackendError::Kind::credential_missing);
        CHECK(std::string(e.what()).find("TEAMPULSE_TEST_UNSET_KEY") != std::string::npos);
    }
}

TEST_CASE("secret scrubbing masks every occurrence") {
    std::string text = "Authorization: Bearer sk-abc123 then sk-abc123 again";
    CHECK(scrub_secrets(text, {"sk-abc123"}) ==
          "Authorization: Bearer *** then *** again");
    CHECK(scrub_secrets("nothing here", {""}) == "nothing here");
}
