#pragma once

// Shared configuration for the CLI. Precedence: flags > environment >
// config file > defaults. Secrets never live in the config file; endpoints
// name the environment variable their key is read from.

#include <cstdlib>
#include <optional>
#include <string>

#include "gdeltkg/http_clients.hpp"
#include "gdeltkg/toml.hpp"

namespace gdeltkg {

struct EndpointSettings {
    std::string base_url;
    std::string model;
    std::string api_key_env;
    int timeout_s = 60;
    int retries = 2;

    EndpointConfig resolve() const {
        EndpointConfig cfg;
        cfg.base_url = base_url;
        cfg.model = model;
        cfg.timeout_s = timeout_s;
        cfg.retries = retries;
        if (!api_key_env.empty())
            if (const char* key = std::getenv(api_key_env.c_str())) cfg.api_key = key;
        return cfg;
    }
};

struct Config {
    // paper-faithful model defaults; any OpenAI-compatible endpoint works
    EndpointSettings chat{"", "Mistral-7B", "GDELTKG_CHAT_API_KEY"};
    EndpointSettings embed{"", "E5-large-v2", "GDELTKG_EMBED_API_KEY"};
    EndpointSettings eval_embed{"", "sentence-transformers/all-MiniLM-L6-v2", "GDELTKG_EVAL_API_KEY"};

    bool stub = false;    // deterministic offline clients everywhere
    int stub_dim = 64;
    size_t k = 5;               // retrieved chunks per question
    size_t sentence_cap = 500;  // graph-route context cap
    size_t chunk_cap = 20;      // rag-route context cap
    int chunk_tokens = 500;
    double temperature = 0.0;
    int max_answer_tokens = 1024;

    // ingest filter defaults (the case-study keyword list)
    std::string default_keywords = "Baltimore,bridge,collapse,ship";

    int fetch_timeout_s = 10;
    int fetch_parallel = 4;
    size_t fetch_max_bytes = 2 * 1024 * 1024;
    std::string user_agent = "gdeltkg/0.1";
};

namespace detail {

inline void apply_endpoint_table(EndpointSettings& ep, const toml::Document& doc, const std::string& table) {
    auto it = doc.tables.find(table);
    if (it == doc.tables.end()) return;
    const toml::Table& t = it->second;
    ep.base_url = t.get_str("base_url", ep.base_url);
    ep.model = t.get_str("model", ep.model);
    ep.api_key_env = t.get_str("api_key_env", ep.api_key_env);
    ep.timeout_s = static_cast<int>(t.get_int("timeout_s", ep.timeout_s));
    ep.retries = static_cast<int>(t.get_int("retries", ep.retries));
}

inline void env_str(const char* name, std::string& target) {
    if (const char* v = std::getenv(name); v && *v) target = v;
}
inline void env_int(const char* name, auto& target) {
    if (const char* v = std::getenv(name); v && *v)
        if (auto parsed = parse_int(v)) target = static_cast<std::decay_t<decltype(target)>>(*parsed);
}
inline void env_bool(const char* name, bool& target) {
    if (const char* v = std::getenv(name); v && *v) {
        std::string s = to_lower(v);
        target = (s == "1" || s == "true" || s == "yes" || s == "on");
    }
}

}  // namespace detail

inline void apply_config_file(Config& cfg, const std::string& path) {
    auto doc = toml::parse_file(path);
    detail::apply_endpoint_table(cfg.chat, doc, "chat");
    detail::apply_endpoint_table(cfg.embed, doc, "embed");
    detail::apply_endpoint_table(cfg.eval_embed, doc, "eval_embed");
    const toml::Table& root = doc.root;
    cfg.stub = root.get_bool("stub", cfg.stub);
    cfg.stub_dim = static_cast<int>(root.get_int("stub_dim", cfg.stub_dim));
    cfg.k = static_cast<size_t>(root.get_int("k", static_cast<int64_t>(cfg.k)));
    cfg.sentence_cap = static_cast<size_t>(root.get_int("sentence_cap", static_cast<int64_t>(cfg.sentence_cap)));
    cfg.chunk_cap = static_cast<size_t>(root.get_int("chunk_cap", static_cast<int64_t>(cfg.chunk_cap)));
    cfg.chunk_tokens = static_cast<int>(root.get_int("chunk_tokens", cfg.chunk_tokens));
    cfg.temperature = root.get_double("temperature", cfg.temperature);
    cfg.max_answer_tokens = static_cast<int>(root.get_int("max_answer_tokens", cfg.max_answer_tokens));
    cfg.default_keywords = root.get_str("default_keywords", cfg.default_keywords);
    cfg.fetch_timeout_s = static_cast<int>(root.get_int("fetch_timeout_s", cfg.fetch_timeout_s));
    cfg.fetch_parallel = static_cast<int>(root.get_int("fetch_parallel", cfg.fetch_parallel));
    cfg.user_agent = root.get_str("user_agent", cfg.user_agent);
}

inline void apply_env(Config& cfg) {
    detail::env_str("GDELTKG_CHAT_BASE_URL", cfg.chat.base_url);
    detail::env_str("GDELTKG_CHAT_MODEL", cfg.chat.model);
    detail::env_str("GDELTKG_EMBED_BASE_URL", cfg.embed.base_url);
    detail::env_str("GDELTKG_EMBED_MODEL", cfg.embed.model);
    detail::env_str("GDELTKG_EVAL_BASE_URL", cfg.eval_embed.base_url);
    detail::env_str("GDELTKG_EVAL_MODEL", cfg.eval_embed.model);
    detail::env_bool("GDELTKG_STUB", cfg.stub);
    detail::env_int("GDELTKG_K", cfg.k);
    detail::env_int("GDELTKG_SENTENCE_CAP", cfg.sentence_cap);
    detail::env_int("GDELTKG_CHUNK_CAP", cfg.chunk_cap);
}

/// Defaults, then the config file (when given), then environment overrides.
/// Flag overrides are applied by the CLI after this.
inline Config load_config(const std::string& config_path = "") {
    Config cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    apply_env(cfg);
    return cfg;
}

}  // namespace gdeltkg
