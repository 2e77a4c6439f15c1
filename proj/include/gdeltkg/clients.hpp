#pragma once

// Embedding and chat client interfaces plus the deterministic stubs used in
// offline/test runs. The HTTP implementations live in http_clients.hpp to
// keep the networking dependency out of code that only needs the interface.

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdeltkg/tokenize.hpp"
#include "gdeltkg/util.hpp"

namespace gdeltkg {

class ClientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmbedClient {
public:
    virtual ~EmbedClient() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;

    std::vector<float> embed_one(const std::string& text) {
        auto v = embed({text});
        if (v.size() != 1) throw ClientError("embedder returned " + std::to_string(v.size()) + " vectors for 1 text");
        return std::move(v[0]);
    }
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string model() const = 0;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Deterministic bag-of-tokens embedder: each token hashes to a pseudorandom
/// direction, the sum is L2-normalized. Identical text gives an identical
/// unit vector; shared vocabulary gives nearby vectors.
class StubEmbedClient final : public EmbedClient {
public:
    explicit StubEmbedClient(int dim = 64) : dim_(dim) {
        if (dim_ < 1) throw std::invalid_argument("embedding dim must be positive");
    }

    std::string id() const override { return "stub-embed-" + std::to_string(dim_) + "d"; }

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override {
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_text(t));
        return out;
    }

private:
    static uint64_t splitmix64(uint64_t& state) {
        state += 0x9E3779B97f4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::vector<float> embed_text(const std::string& text) const {
        std::vector<double> acc(static_cast<size_t>(dim_), 0.0);
        auto tokens = default_tokenizer().tokenize(text);
        if (tokens.empty()) tokens.push_back("");
        for (const auto& tok : tokens) {
            uint64_t state = fnv1a64(to_lower(tok));
            for (auto& a : acc) {
                uint64_t r = splitmix64(state);
                a += static_cast<double>(r % 2001) / 1000.0 - 1.0;  // [-1, 1]
            }
        }
        double norm = 0;
        for (double a : acc) norm += a * a;
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            // degenerate direction; fall back to a hash of the whole text
            uint64_t state = fnv1a64(text) ^ 0xABCDEF12345ull;
            for (auto& a : acc) a = static_cast<double>(splitmix64(state) % 2001) / 1000.0 - 1.0 + 0.001;
            norm = 0;
            for (double a : acc) norm += a * a;
            norm = std::sqrt(norm);
        }
        std::vector<float> out(static_cast<size_t>(dim_));
        for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(acc[i] / norm);
        return out;
    }

    int dim_;
};

/// Deterministic chat stub: repackages the prompt's context (everything
/// after the instruction line) as the answer.
class StubChatClient final : public ChatClient {
public:
    std::string model() const override { return "stub-chat"; }

    std::string complete(const std::string& prompt) override {
        size_t newline = prompt.find('\n');
        std::string context = newline == std::string::npos ? prompt : prompt.substr(newline + 1);
        if (trim(context).empty()) return "No information was provided.";
        return "Based on the provided information: " + std::string(trim(context));
    }
};

}  // namespace gdeltkg
