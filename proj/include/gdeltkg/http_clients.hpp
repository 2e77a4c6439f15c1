#pragma once

// OpenAI-compatible HTTP clients: POST {base}/embeddings and
// {base}/chat/completions. Any endpoint speaking that shape works (llama.cpp
// server, vLLM, TGI's shim, the hosted APIs). Transient failures retry with
// a short backoff; persistent ones surface as ClientError.

#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gdeltkg/clients.hpp"

namespace gdeltkg {

struct EndpointConfig {
    std::string base_url;     // e.g. "http://localhost:8000/v1"
    std::string model;
    std::string api_key;      // resolved from the configured env var, may be empty
    int timeout_s = 60;
    int retries = 2;
};

namespace detail {

struct Endpoint {
    std::string origin;
    std::string path_prefix;
};

inline Endpoint parse_endpoint(const std::string& base_url) {
    size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw ClientError("endpoint base URL must include a scheme: " + base_url);
    size_t path_start = base_url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string::npos) {
        ep.origin = base_url;
    } else {
        ep.origin = base_url.substr(0, path_start);
        ep.path_prefix = base_url.substr(path_start);
        while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
    }
    return ep;
}

inline nlohmann::json post_json(const EndpointConfig& cfg, const std::string& route, const nlohmann::json& body) {
    Endpoint ep = parse_endpoint(cfg.base_url);
    std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 * attempt));
        httplib::Client cli(ep.origin);
        cli.set_connection_timeout(cfg.timeout_s, 0);
        cli.set_read_timeout(cfg.timeout_s, 0);
        httplib::Headers headers;
        if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
        auto res = cli.Post(ep.path_prefix + route, headers, payload, "application/json");
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
            continue;  // connection-level problem, retry
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw ClientError("endpoint " + route + " returned " + std::to_string(res->status) + ": " + res->body);
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw ClientError("endpoint " + route + " returned unparseable JSON: " + e.what());
        }
    }
    throw ClientError("endpoint " + route + " unreachable after " + std::to_string(cfg.retries + 1) +
                      " attempts: " + last_error);
}

}  // namespace detail

class HttpEmbedClient final : public EmbedClient {
public:
    explicit HttpEmbedClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty())
            throw ClientError("embedding endpoint not configured (set base URL or use stub mode)");
    }

    std::string id() const override { return "openai:" + cfg_.model; }

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override {
        nlohmann::json body{{"model", cfg_.model}, {"input", texts}};
        nlohmann::json resp = detail::post_json(cfg_, "/embeddings", body);
        if (!resp.contains("data") || !resp["data"].is_array() || resp["data"].size() != texts.size())
            throw ClientError("embeddings response shape unexpected");
        std::vector<std::vector<float>> out(texts.size());
        for (const auto& item : resp["data"]) {
            size_t idx = item.value("index", out.size());
            if (idx >= out.size()) throw ClientError("embeddings response index out of range");
            out[idx] = item.at("embedding").get<std::vector<float>>();
        }
        return out;
    }

private:
    EndpointConfig cfg_;
};

class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(EndpointConfig cfg, double temperature = 0.0, int max_tokens = 1024)
        : cfg_(std::move(cfg)), temperature_(temperature), max_tokens_(max_tokens) {
        if (cfg_.base_url.empty())
            throw ClientError("chat endpoint not configured (set base URL or use stub mode)");
    }

    std::string model() const override { return cfg_.model; }

    std::string complete(const std::string& prompt) override {
        nlohmann::json body{{"model", cfg_.model},
                            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                            {"temperature", temperature_},
                            {"max_tokens", max_tokens_}};
        nlohmann::json resp = detail::post_json(cfg_, "/chat/completions", body);
        try {
            return resp.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ClientError("chat response shape unexpected: " + std::string(e.what()));
        }
    }

private:
    EndpointConfig cfg_;
    double temperature_;
    int max_tokens_;
};

}  // namespace gdeltkg
