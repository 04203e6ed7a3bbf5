#include "teampulse/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

void AppConfig::resolve_defaults() {
    if (templates_dir.empty()) templates_dir = data_dir + "/templates";
    if (function_words_path.empty())
        function_words_path = data_dir + "/lexicons/function_words.tsv";
    if (valence_path.empty()) valence_path = data_dir + "/lexicons/valence.tsv";
}

std::string interpolate_env(const std::string& value) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
            auto end = value.find('}', i + 2);
            if (end == std::string::npos)
                throw ConfigError("unterminated ${...} reference in \"" + value + "\"");
            std::string name = value.substr(i + 2, end - i - 2);
            const char* v = std::getenv(name.c_str());
            if (v == nullptr)
                throw ConfigError("environment variable " + name + " referenced in config is not set");
            out += v;
            i = end + 1;
        } else {
            out += value[i++];
        }
    }
    return out;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    AppConfig cfg;
    const std::set<std::string> known = {
        "data_dir",       "templates_dir",      "function_words_path",
        "valence_path",   "backend",            "replay_dir",
        "endpoint",       "model_id",           "credential_env",
        "delivery",       "webhook_url",        "workspace_base_url",
        "workspace_token_env", "channel_id",
        "timeout_ms",     "retries",            "max_concurrency",
        "engagement_low", "sentiment_negative", "lsm_low"};
    for (auto& [key, value] : j.items())
        if (!known.contains(key)) throw ConfigError("unknown config key \"" + key + "\"");

    auto str = [&](const char* key, std::string& field) {
        if (j.contains(key)) {
            if (!j[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
            field = interpolate_env(j[key].get<std::string>());
        }
    };
    str("data_dir", cfg.data_dir);
    str("templates_dir", cfg.templates_dir);
    str("function_words_path", cfg.function_words_path);
    str("valence_path", cfg.valence_path);
    str("backend", cfg.backend);
    str("replay_dir", cfg.replay_dir);
    str("endpoint", cfg.endpoint);
    str("model_id", cfg.model_id);
    str("credential_env", cfg.credential_env);
    str("delivery", cfg.delivery);
    str("webhook_url", cfg.webhook_url);
    str("workspace_base_url", cfg.workspace_base_url);
    str("workspace_token_env", cfg.workspace_token_env);
    str("channel_id", cfg.channel_id);

    if (j.contains("timeout_ms"))
        cfg.policy.timeout = std::chrono::milliseconds(j["timeout_ms"].get<int>());
    if (j.contains("retries")) cfg.policy.retries = j["retries"].get<int>();
    if (j.contains("max_concurrency"))
        cfg.policy.max_concurrency = j["max_concurrency"].get<int>();
    if (j.contains("engagement_low"))
        cfg.thresholds.engagement_low = j["engagement_low"].get<double>();
    if (j.contains("sentiment_negative"))
        cfg.thresholds.sentiment_negative = j["sentiment_negative"].get<double>();
    if (j.contains("lsm_low")) cfg.thresholds.lsm_low = j["lsm_low"].get<double>();

    static const std::set<std::string> backends = {"mock", "replay", "http"};
    if (!backends.contains(cfg.backend))
        throw ConfigError("backend must be one of mock, replay, http; got \"" + cfg.backend + "\"");
    static const std::set<std::string> deliveries = {"dry-run", "webhook", "workspace"};
    if (!deliveries.contains(cfg.delivery))
        throw ConfigError("delivery must be one of dry-run, webhook, workspace; got \"" +
                          cfg.delivery + "\"");

    cfg.resolve_defaults();
    return cfg;
}

AppConfig default_config(const std::string& data_dir) {
    AppConfig cfg;
    cfg.data_dir = data_dir;
    cfg.resolve_defaults();
    return cfg;
}

}  // namespace teampulse
