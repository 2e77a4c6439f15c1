#pragma once

// Vector store for RAG: article bodies split into <=500-token chunks, one
// embedding per chunk, exhaustive nearest-neighbor scan under the Euclidean
// metric. Desk-scale corpora make exact search both feasible and testable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdeltkg/clients.hpp"
#include "gdeltkg/fetch.hpp"
#include "gdeltkg/tokenize.hpp"

namespace gdeltkg {

struct Chunk {
    std::string document_identifier;
    int chunk_index = 0;
    std::string text;
    int token_count = 0;
};

inline constexpr int kDefaultChunkTokens = 500;

/// Greedy left-to-right packing of the document's tokens into chunks of at
/// most max_tokens. Joining the chunks in index order reproduces the
/// document's token sequence.
inline std::vector<Chunk> chunk_text(const std::string& document_identifier, const std::string& body,
                                     const Tokenizer& tokenizer = default_tokenizer(),
                                     int max_tokens = kDefaultChunkTokens) {
    if (max_tokens < 1) throw std::invalid_argument("max_tokens must be positive");
    std::vector<Chunk> chunks;
    auto tokens = tokenizer.tokenize(body);
    for (size_t start = 0; start < tokens.size(); start += static_cast<size_t>(max_tokens)) {
        size_t end = std::min(tokens.size(), start + static_cast<size_t>(max_tokens));
        Chunk c;
        c.document_identifier = document_identifier;
        c.chunk_index = static_cast<int>(chunks.size());
        c.text = tokenizer.join(tokens, start, end);
        c.token_count = static_cast<int>(end - start);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

struct StoreEntry {
    Chunk chunk;
    std::vector<float> vec;
};

struct VectorStore {
    int dim = 0;
    std::string embedder_id;
    std::string tokenizer_name = "whitespace";
    int max_tokens = kDefaultChunkTokens;
    std::vector<StoreEntry> entries;

    bool empty() const { return entries.empty(); }
    size_t size() const { return entries.size(); }
};

struct StoreBuildReport {
    size_t documents = 0, chunks = 0;
    struct Failure {
        std::string document_identifier;
        int chunk_index;
        std::string error;
    };
    std::vector<Failure> failures;  // embeddings that failed after retries
};

struct StoreBuildOptions {
    int max_tokens = kDefaultChunkTokens;
    size_t batch_size = 16;
    int retries = 2;
};

inline VectorStore build_store(const std::vector<ArticleText>& corpus, EmbedClient& embedder,
                               const Tokenizer& tokenizer = default_tokenizer(),
                               const StoreBuildOptions& opts = {}, StoreBuildReport* report_out = nullptr) {
    StoreBuildReport report;
    std::vector<Chunk> chunks;
    for (const auto& doc : corpus) {
        if (!doc.has_text() || doc.body.empty()) continue;
        ++report.documents;
        for (auto& c : chunk_text(doc.document_identifier, doc.body, tokenizer, opts.max_tokens))
            chunks.push_back(std::move(c));
    }
    if (chunks.empty()) throw std::runtime_error("nothing to index");
    report.chunks = chunks.size();

    VectorStore store;
    store.embedder_id = embedder.id();
    store.tokenizer_name = tokenizer.name();
    store.max_tokens = opts.max_tokens;

    for (size_t start = 0; start < chunks.size(); start += opts.batch_size) {
        size_t end = std::min(chunks.size(), start + opts.batch_size);
        std::vector<std::string> texts;
        for (size_t i = start; i < end; ++i) texts.push_back(chunks[i].text);

        std::vector<std::vector<float>> vecs;
        std::string last_error;
        for (int attempt = 0; attempt <= opts.retries; ++attempt) {
            try {
                vecs = embedder.embed(texts);
                if (vecs.size() != texts.size())
                    throw ClientError("embedder returned " + std::to_string(vecs.size()) + " vectors for " +
                                      std::to_string(texts.size()) + " texts");
                last_error.clear();
                break;
            } catch (const std::exception& e) {
                last_error = e.what();
                vecs.clear();
            }
        }
        if (!last_error.empty()) {
            for (size_t i = start; i < end; ++i)
                report.failures.push_back({chunks[i].document_identifier, chunks[i].chunk_index, last_error});
            continue;
        }
        for (size_t i = start; i < end; ++i) {
            auto& vec = vecs[i - start];
            if (store.dim == 0) store.dim = static_cast<int>(vec.size());
            if (static_cast<int>(vec.size()) != store.dim)
                throw std::runtime_error("embedding dimension changed mid-build: expected " +
                                         std::to_string(store.dim) + ", got " + std::to_string(vec.size()));
            store.entries.push_back({std::move(chunks[i]), std::move(vec)});
        }
    }
    if (store.entries.empty()) throw std::runtime_error("all embeddings failed: " +
                                                        (report.failures.empty() ? std::string("?") : report.failures.front().error));
    if (report_out) *report_out = report;
    return store;
}

struct Neighbor {
    const StoreEntry* entry = nullptr;
    double distance = 0;
};

/// Exhaustive top-k under Euclidean distance; ties break on
/// (document_identifier, chunk_index) ascending.
inline std::vector<Neighbor> nearest_entries(const VectorStore& store, const std::vector<float>& query, size_t k) {
    if (store.empty()) throw std::runtime_error("store empty");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (static_cast<int>(query.size()) != store.dim)
        throw std::runtime_error("query dimension " + std::to_string(query.size()) +
                                 " does not match store dimension " + std::to_string(store.dim));
    std::vector<Neighbor> all;
    all.reserve(store.size());
    for (const auto& entry : store.entries) {
        double d2 = 0;
        for (size_t i = 0; i < query.size(); ++i) {
            double diff = static_cast<double>(entry.vec[i]) - static_cast<double>(query[i]);
            d2 += diff * diff;
        }
        all.push_back({&entry, d2});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.entry->chunk.document_identifier != b.entry->chunk.document_identifier)
            return a.entry->chunk.document_identifier < b.entry->chunk.document_identifier;
        return a.entry->chunk.chunk_index < b.entry->chunk.chunk_index;
    });
    if (all.size() > k) all.resize(k);
    for (auto& n : all) n.distance = std::sqrt(n.distance);
    return all;
}

inline std::vector<Neighbor> nearest_chunks(const VectorStore& store, const std::string& query_text, size_t k,
                                            EmbedClient& embedder) {
    if (embedder.id() != store.embedder_id)
        throw std::runtime_error("store was built with embedder '" + store.embedder_id +
                                 "' but the configured embedder is '" + embedder.id() + "'");
    return nearest_entries(store, embedder.embed_one(query_text), k);
}

inline constexpr const char* kStoreFormat = "gdeltkg-store";
inline constexpr int kStoreFormatVersion = 1;

inline void save_store(const VectorStore& store, const std::string& path) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : store.entries)
        entries.push_back({{"doc", e.chunk.document_identifier},
                           {"i", e.chunk.chunk_index},
                           {"tokens", e.chunk.token_count},
                           {"text", e.chunk.text},
                           {"vec", e.vec}});
    nlohmann::json j{{"format", kStoreFormat},
                     {"format_version", kStoreFormatVersion},
                     {"dim", store.dim},
                     {"embedder", store.embedder_id},
                     {"tokenizer", store.tokenizer_name},
                     {"max_tokens", store.max_tokens},
                     {"entries", entries}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump() << "\n";
}

/// Loads a store; when expected_embedder is non-empty it must match the id
/// recorded at build time (mixed embedding spaces are an error, not a
/// degraded search).
inline VectorStore load_store(const std::string& path, const std::string& expected_embedder = "") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt store file " + path + ": " + e.what());
    }
    if (j.value("format", "") != kStoreFormat)
        throw std::runtime_error("not a store file (format field missing or wrong)");
    int ver = j.value("format_version", 0);
    if (ver != kStoreFormatVersion)
        throw std::runtime_error("store file format_version " + std::to_string(ver) +
                                 " unsupported; this build reads version " + std::to_string(kStoreFormatVersion));
    VectorStore store;
    store.dim = j.at("dim").get<int>();
    store.embedder_id = j.at("embedder").get<std::string>();
    store.tokenizer_name = j.value("tokenizer", "whitespace");
    store.max_tokens = j.value("max_tokens", kDefaultChunkTokens);
    for (const auto& e : j.at("entries")) {
        StoreEntry entry;
        entry.chunk.document_identifier = e.at("doc").get<std::string>();
        entry.chunk.chunk_index = e.at("i").get<int>();
        entry.chunk.token_count = e.at("tokens").get<int>();
        entry.chunk.text = e.at("text").get<std::string>();
        entry.vec = e.at("vec").get<std::vector<float>>();
        if (static_cast<int>(entry.vec.size()) != store.dim)
            throw std::runtime_error("corrupt store file " + path + ": entry dimension mismatch");
        store.entries.push_back(std::move(entry));
    }
    if (!expected_embedder.empty() && expected_embedder != store.embedder_id)
        throw std::runtime_error("store was built with embedder '" + store.embedder_id +
                                 "' but the configured embedder is '" + expected_embedder + "'");
    return store;
}

}  // namespace gdeltkg
