#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace teampulse {

struct CompletionRequest {
    std::string system_text;
    std::string user_text;
    std::string model_id;
    int max_output_tokens = 1024;
    double temperature = 0.0;
    /// "team", "member:<id>", or "ranking-eval"; unique within a cycle.
    std::string request_tag;
};

struct CompletionResult {
    std::string text;
    std::chrono::milliseconds latency{0};
    int prompt_tokens = 0;
    int completion_tokens = 0;
    std::string backend_identity;
    int attempts = 1;
};

struct BackendPolicy {
    std::chrono::milliseconds timeout{30000};
    int retries = 2;  // retries after the first attempt
    std::chrono::milliseconds backoff_base{200};
    int max_concurrency = 4;
};

/// A chat-completion backend. Implementations must be safe to share
/// read-only across threads.
class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResult complete(const CompletionRequest& req) = 0;
    virtual std::string identity() const = 0;
};

/// Retries with exponential backoff per policy; rethrows the last
/// BackendError once retries are exhausted. `attempts` in the result counts
/// all tries including the successful one.
CompletionResult complete_with_policy(Backend& backend, const CompletionRequest& req,
                                      const BackendPolicy& policy);

/// One team request plus one request per member, bounded parallelism per
/// policy. Partial failure is a non-fatal outcome carrying the successes.
struct FanOutReport {
    std::map<std::string, CompletionResult> successes;  // by request_tag
    std::map<std::string, std::string> failures;        // request_tag -> reason
    bool all_succeeded() const { return failures.empty(); }
};

FanOutReport fan_out(Backend& backend, const CompletionRequest& team_req,
                     const std::vector<CompletionRequest>& member_reqs,
                     const BackendPolicy& policy);

/// Stable 64-bit fingerprint of a request's text; keys replay fixtures.
std::uint64_t request_fingerprint(const CompletionRequest& req);

/// Deterministic offline backend: a pure function of (request text, seed).
/// Emits a syntactically valid feedback document with the section headings
/// the validator expects, echoing data it finds in the prompt.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::uint64_t seed = 0) : seed_(seed) {}
    CompletionResult complete(const CompletionRequest& req) override;
    std::string identity() const override { return "mock"; }

private:
    std::uint64_t seed_;
};

/// Replays fixtures recorded by RecordingBackend; zero network calls.
/// Throws BackendError for a request with no recorded fixture.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::string fixture_dir) : dir_(std::move(fixture_dir)) {}
    CompletionResult complete(const CompletionRequest& req) override;
    std::string identity() const override { return "replay"; }

private:
    std::string dir_;
};

/// Pass-through wrapper that records every (request, response) pair under
/// fixture_dir keyed by request fingerprint.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, std::string fixture_dir)
        : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {}
    CompletionResult complete(const CompletionRequest& req) override;
    std::string identity() const override { return inner_->identity() + "+record"; }

private:
    std::shared_ptr<Backend> inner_;
    std::string dir_;
};

struct HttpBackendConfig {
    std::string endpoint;  // e.g. https://host/v1/chat/completions
    std::string model_id;
    std::string credential_env;  // name of the env var holding the API key
    std::chrono::milliseconds timeout{30000};
};

/// Chat-completion client speaking the common JSON wire shape
/// ({model, messages[], temperature, max_tokens} -> choices[0].message).
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    CompletionResult complete(const CompletionRequest& req) override;
    std::string identity() const override;

private:
    HttpBackendConfig config_;
};

/// Masks every occurrence of the given secrets in `text` so credentials
/// never reach logs or reports.
std::string scrub_secrets(std::string text, const std::vector<std::string>& secrets);

}  // namespace teampulse
