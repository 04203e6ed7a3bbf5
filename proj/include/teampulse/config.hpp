#pragma once

#include <string>

#include "teampulse/llm.hpp"
#include "teampulse/promptkit.hpp"

namespace teampulse {

/// Application configuration, loaded from JSON. Every string field passes
/// through `${VAR}` environment interpolation; secrets must be supplied
/// that way and never written literally into the file.
struct AppConfig {
    std::string data_dir = "data";
    std::string templates_dir;       // defaults to <data_dir>/templates
    std::string function_words_path; // defaults to <data_dir>/lexicons/function_words.tsv
    std::string valence_path;        // defaults to <data_dir>/lexicons/valence.tsv

    // Backend selection: "mock", "replay", or "http".
    std::string backend = "mock";
    std::string replay_dir = "fixtures/llm";
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model_id = "gpt-4o";
    std::string credential_env = "TEAMPULSE_API_KEY";

    // Delivery: "dry-run", "webhook", or "workspace".
    std::string delivery = "dry-run";
    std::string webhook_url;
    std::string workspace_base_url;
    std::string workspace_token_env = "TEAMPULSE_BOT_TOKEN";
    std::string channel_id = "general";

    BackendPolicy policy;
    JudgmentThresholds thresholds;

    /// Fills path fields that were left empty from data_dir.
    void resolve_defaults();
};

/// Expands `${VAR}` references from the environment. Throws ConfigError on
/// a reference to an unset variable.
std::string interpolate_env(const std::string& value);

/// Parses a JSON config file. Unknown keys are rejected so typos fail fast.
AppConfig load_config(const std::string& path);

/// Built-in defaults, paths resolved relative to `data_dir`.
AppConfig default_config(const std::string& data_dir = "data");

}  // namespace teampulse
