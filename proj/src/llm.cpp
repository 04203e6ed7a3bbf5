#include "teampulse/llm.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib/httplib.h"
#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t request_fingerprint(const CompletionRequest& req) {
    // FNV-1a over system + RS + user; stable across runs and platforms.
    std::uint64_t hash = 1469598103934665603ull;
    auto mix = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ull;
        }
        hash ^= 0x1e;
        hash *= 1099511628211ull;
    };
    mix(req.system_text);
    mix(req.user_text);
    return hash;
}

CompletionResult complete_with_policy(Backend& backend, const CompletionRequest& req,
                                      const BackendPolicy& policy) {
    int attempts = 0;
    for (;;) {
        ++attempts;
        try {
            CompletionResult result = backend.complete(req);
            result.attempts = attempts;
            return result;
        } catch (const BackendError& e) {
            bool retryable = e.kind() == BackendError::Kind::timeout ||
                             e.kind() == BackendError::Kind::http;
            if (!retryable || attempts > policy.retries) throw;
            std::this_thread::sleep_for(policy.backoff_base * (1 << (attempts - 1)));
        }
    }
}

FanOutReport fan_out(Backend& backend, const CompletionRequest& team_req,
                     const std::vector<CompletionRequest>& member_reqs,
                     const BackendPolicy& policy) {
    std::vector<CompletionRequest> requests;
    requests.push_back(team_req);
    requests.insert(requests.end(), member_reqs.begin(), member_reqs.end());

    FanOutReport report;
    std::mutex mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= requests.size()) return;
            const CompletionRequest& req = requests[i];
            try {
                CompletionResult result = complete_with_policy(backend, req, policy);
                std::lock_guard lock(mutex);
                report.successes.emplace(req.request_tag, std::move(result));
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                report.failures.emplace(req.request_tag, e.what());
            }
        }
    };

    std::size_t threads = std::min<std::size_t>(
        std::max(1, policy.max_concurrency), requests.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return report;
}

// ---------------------------------------------------------------------------
// MockBackend
// ---------------------------------------------------------------------------

namespace {

std::string find_prompt_line(const std::string& text, const std::string& label) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find(label);
        if (pos != std::string::npos) {
            std::string rest = line.substr(pos + label.size());
            auto begin = rest.find_first_not_of(" \t");
            return begin == std::string::npos ? "" : rest.substr(begin);
        }
    }
    return "";
}

}  // namespace

CompletionResult MockBackend::complete(const CompletionRequest& req) {
    std::uint64_t fp = request_fingerprint(req) ^ seed_;
    char fp_hex[20];
    std::snprintf(fp_hex, sizeof(fp_hex), "%016llx", static_cast<unsigned long long>(fp));

    std::string goal = find_prompt_line(req.user_text, "Team Task:");
    if (goal.empty()) goal = "the shared objective";
    std::string sentiment = find_prompt_line(req.user_text, "Team Sentiment:");
    std::string engagement = find_prompt_line(req.user_text, "Words Spoken Percentage:");
    std::string style = find_prompt_line(req.user_text, "Language Style Matching:");

    std::ostringstream body;
    bool team = req.request_tag == "team";
    if (req.request_tag == "ranking-eval") {
        body << "> Ranking Evaluation\n"
             << "The team ranked the items close to the expert order in several places. "
             << "Review the largest positional gaps first. (trace " << fp_hex << ")\n";
    } else if (team) {
        body << "> Summary of Goals and Contributions\n"
             << "The team worked toward " << goal
             << " and kept most of the discussion on that objective."
             << (sentiment.empty() ? "" : " Overall sentiment was " + sentiment + ".")
             << " (trace " << fp_hex << ")\n\n"
             << "> Key Strengths\n"
             << "- *Engagement:* every member contributed to the discussion.\n"
             << "- *Collaboration:* ideas were built on rather than dismissed.\n\n"
             << "> Areas for Improvement\n"
             << "- Some turns overlapped; give each other room to finish a thought.\n\n"
             << "> Actionable Steps\n"
             << "- Restate the objective once mid-discussion to keep focus.\n"
             << "- Invite the quietest member to weigh in before deciding.\n";
    } else {
        body << "> Summary of Contribution\n"
             << "You contributed to " << goal << " throughout the discussion."
             << (engagement.empty() ? "" : " You spoke " + engagement + " of the words.")
             << " (trace " << fp_hex << ")\n\n"
             << "> Key Strengths\n"
             << "- *Engagement:* steady participation across the session.\n"
             << (style.empty() ? std::string()
                               : "- *Language Style Matching:* alignment score " + style + ".\n")
             << "\n> Areas for Improvement\n"
             << "- Add supporting detail to your proposals so they are easier to act on.\n\n"
             << "> Actionable Steps\n"
             << "- Back your next suggestion with one concrete example.\n";
    }

    CompletionResult result;
    result.text = body.str();
    result.backend_identity = identity();
    result.completion_tokens = static_cast<int>(result.text.size() / 4);
    result.prompt_tokens = static_cast<int>((req.system_text.size() + req.user_text.size()) / 4);
    return result;
}

// ---------------------------------------------------------------------------
// Record / replay
// ---------------------------------------------------------------------------

namespace {

fs::path fixture_path(const std::string& dir, const CompletionRequest& req) {
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx.json",
                  static_cast<unsigned long long>(request_fingerprint(req)));
    return fs::path(dir) / name;
}

}  // namespace

CompletionResult ReplayBackend::complete(const CompletionRequest& req) {
    fs::path path = fixture_path(dir_, req);
    std::ifstream in(path);
    if (!in)
        throw BackendError(BackendError::Kind::malformed_response,
                           "no replay fixture for request '" + req.request_tag + "' (" +
                               path.string() + ")");
    json doc = json::parse(in);
    CompletionResult result;
    result.text = doc.at("text").get<std::string>();
    result.prompt_tokens = doc.value("prompt_tokens", 0);
    result.completion_tokens = doc.value("completion_tokens", 0);
    result.backend_identity = identity();
    return result;
}

CompletionResult RecordingBackend::complete(const CompletionRequest& req) {
    CompletionResult result = inner_->complete(req);
    fs::create_directories(dir_);
    json doc = {{"request_tag", req.request_tag},
                {"text", result.text},
                {"prompt_tokens", result.prompt_tokens},
                {"completion_tokens", result.completion_tokens},
                {"recorded_from", result.backend_identity}};
    std::ofstream out(fixture_path(dir_, req));
    out << doc.dump(2) << '\n';
    return result;
}

// ---------------------------------------------------------------------------
// HTTP backend
// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::identity() const {
    return "http:" + config_.endpoint + "#" + config_.model_id;
}

CompletionResult HttpBackend::complete(const CompletionRequest& req) {
    const char* key = config_.credential_env.empty()
                          ? nullptr
                          : std::getenv(config_.credential_env.c_str());
    if (config_.credential_env.empty() || !key || !*key)
        throw BackendError(BackendError::Kind::credential_missing,
                           "credential environment variable '" + config_.credential_env +
                               "' is not set");

    // Split endpoint into origin + path for the client.
    std::string endpoint = config_.endpoint;
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("backend endpoint must include a scheme: " + endpoint);
    auto path_begin = endpoint.find('/', scheme_end + 3);
    std::string origin =
        path_begin == std::string::npos ? endpoint : endpoint.substr(0, path_begin);
    std::string path = path_begin == std::string::npos ? "/" : endpoint.substr(path_begin);

    json payload = {
        {"model", config_.model_id.empty() ? req.model_id : config_.model_id},
        {"messages",
         {{{"role", "system"}, {"content", req.system_text}},
          {{"role", "user"}, {"content", req.user_text}}}},
        {"temperature", req.temperature},
        {"max_tokens", req.max_output_tokens},
    };

    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        config_.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

    auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(path, headers, payload.dump(), "application/json");
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    if (!res)
        throw BackendError(BackendError::Kind::timeout,
                           "backend unreachable: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw BackendError(BackendError::Kind::http,
                           "backend HTTP " + std::to_string(res->status), res->status);

    try {
        json doc = json::parse(res->body);
        CompletionResult result;
        result.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (result.text.empty())
            throw BackendError(BackendError::Kind::malformed_response,
                               "backend returned empty completion text");
        if (doc.contains("usage")) {
            result.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
            result.completion_tokens = doc["usage"].value("completion_tokens", 0);
        }
        result.latency = latency;
        result.backend_identity = identity();
        return result;
    } catch (const json::exception& e) {
        throw BackendError(BackendError::Kind::malformed_response,
                           std::string("malformed backend response: ") + e.what());
    }
}

std::string scrub_secrets(std::string text, const std::vector<std::string>& secrets) {
    for (const auto& secret : secrets) {
        if (secret.empty()) continue;
        std::size_t pos = 0;
        while ((pos = text.find(secret, pos)) != std::string::npos) {
            text.replace(pos, secret.size(), "***");
            pos += 3;
        }
    }
    return text;
}

}  // namespace teampulse
