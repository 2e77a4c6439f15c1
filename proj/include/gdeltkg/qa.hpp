#pragma once

// Question answering over the two in-scope retrieval routes. The graph route
// retrieves an edge-induced subgraph by keywords and prompts with its triple
// sentences; the RAG route retrieves nearest chunks from the vector store.
// Both use the same instruction prefix so retrieval is the only variable.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdeltkg/clients.hpp"
#include "gdeltkg/query.hpp"
#include "gdeltkg/store.hpp"
#include "gdeltkg/toml.hpp"

namespace gdeltkg {

inline constexpr const char* kPromptPrefix = "Please answer the question given the following information:";

struct Question {
    std::string id;
    std::string text;
    std::vector<std::string> keywords;  // graph route retrieval terms
};

/// The benchmark's default question set with its per-question keyword lists.
inline std::vector<Question> default_questions() {
    return {
        {"q1", "What is the name of the Bridge that collapsed and what river was it on?",
         {"Bridge", "Collapse", "River"}},
        {"q2", "What is the name of the ship that collided with the baltimore bridge?",
         {"Ship", "Collide", "Baltimore", "Bridge"}},
        {"q3", "How many articles did CNN publish about the Baltimore bridge collapse?",
         {"CNN", "Baltimore", "Bridge", "Collapse"}},
        {"q4", "On what date did the Baltimore Bridge collapse?", {"Date", "Baltimore", "Bridge", "Collapse"}},
        {"q5", "Who is Brandon Scott?", {"Brandon Scott"}},
        {"q6", "Who is Niki Fennoy?", {"Niki Fennoy"}},
        {"q7", "What are the top themes present in the data?", {"Has_Theme"}},
    };
}

inline std::vector<Question> load_questions(const std::string& path) {
    auto doc = toml::parse_file(path);
    auto it = doc.arrays.find("question");
    if (it == doc.arrays.end()) throw std::runtime_error(path + " has no [[question]] entries");
    std::vector<Question> out;
    std::set<std::string> ids;
    for (const auto& t : it->second) {
        Question q;
        q.id = t.get_str("id");
        q.text = t.get_str("text");
        q.keywords = t.get_str_array("keywords");
        if (q.id.empty() || q.text.empty())
            throw std::runtime_error(path + ": every question needs an id and text");
        if (!ids.insert(q.id).second) throw std::runtime_error(path + ": duplicate question id " + q.id);
        out.push_back(std::move(q));
    }
    return out;
}

enum class Method { GraphQuery, VectorRag, Imported };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::GraphQuery: return "graph_query";
        case Method::VectorRag: return "vector_rag";
        case Method::Imported: return "imported";
    }
    return "unknown";
}

struct QAResult {
    std::string question_id;
    Method method = Method::GraphQuery;
    std::string method_label;  // method_name, or "imported:<system>" for imports
    std::string prompt;        // verbatim, for audit
    std::string answer;
    std::string model;
    std::string status = "ok";  // "ok" | "error"
    std::string error;
    int context_size = 0;
    bool truncated = false;
    double seconds = 0;
    // retrieval references so the prompt is re-derivable
    std::vector<size_t> context_edges;
    std::vector<std::pair<std::string, int>> context_chunks;  // (document, chunk index)
};

struct PromptBuild {
    std::string prompt;
    int context_size = 0;
    bool truncated = false;
};

inline PromptBuild build_graph_prompt(const Question& question, const std::vector<std::string>& sentences,
                                      size_t cap = 500) {
    PromptBuild pb;
    size_t used = std::min(sentences.size(), cap);
    pb.truncated = sentences.size() > cap;
    pb.context_size = static_cast<int>(used);
    pb.prompt = std::string(kPromptPrefix) + "\n" + question.text;
    for (size_t i = 0; i < used; ++i) pb.prompt += "\n" + sentences[i];
    return pb;
}

inline PromptBuild build_rag_prompt(const Question& question, const std::vector<std::string>& chunks,
                                    size_t cap = 20) {
    PromptBuild pb;
    std::vector<std::string> distinct;
    std::set<std::string> seen;
    for (const auto& c : chunks)
        if (seen.insert(c).second) distinct.push_back(c);
    size_t used = std::min(distinct.size(), cap);
    pb.truncated = distinct.size() > cap;
    pb.context_size = static_cast<int>(used);
    pb.prompt = std::string(kPromptPrefix) + "\n" + question.text;
    for (size_t i = 0; i < used; ++i) pb.prompt += "\n\n" + distinct[i];
    return pb;
}

struct QaResources {
    const KnowledgeGraph* kg = nullptr;
    const VectorStore* store = nullptr;
    ChatClient* chat = nullptr;
    EmbedClient* embed = nullptr;
    size_t sentence_cap = 500;
    size_t chunk_cap = 20;
    size_t k = 5;
    bool deterministic = false;  // zero timings; fixed manifest timestamps
};

inline QAResult answer(const Question& question, Method method, const QaResources& res) {
    QAResult r;
    r.question_id = question.id;
    r.method = method;
    r.method_label = method_name(method);
    auto t0 = std::chrono::steady_clock::now();
    auto fail = [&](const std::string& why) {
        r.status = "error";
        r.error = why;
        return r;
    };
    try {
        if (!res.chat) return fail("no chat client configured");
        r.model = res.chat->model();
        if (method == Method::GraphQuery) {
            if (!res.kg) return fail("no knowledge graph configured");
            if (question.keywords.empty()) return fail("graph route requires keywords");
            Subgraph sg = keyword_edge_search(*res.kg, question.keywords);
            auto pb = build_graph_prompt(question, sg.sentences(), res.sentence_cap);
            r.prompt = pb.prompt;
            r.context_size = pb.context_size;
            r.truncated = pb.truncated;
            r.context_edges.assign(sg.edge_ids.begin(), sg.edge_ids.begin() + pb.context_size);
            r.answer = res.chat->complete(r.prompt);
        } else if (method == Method::VectorRag) {
            if (!res.store) return fail("no vector store configured");
            if (!res.embed) return fail("no embedding client configured");
            if (res.store->empty()) return fail("store empty");
            auto neighbors = nearest_chunks(*res.store, question.text, res.k, *res.embed);
            std::vector<std::string> texts;
            for (const auto& n : neighbors) {
                texts.push_back(n.entry->chunk.text);
                r.context_chunks.emplace_back(n.entry->chunk.document_identifier, n.entry->chunk.chunk_index);
            }
            auto pb = build_rag_prompt(question, texts, res.chunk_cap);
            r.prompt = pb.prompt;
            r.context_size = pb.context_size;
            r.truncated = pb.truncated;
            r.answer = res.chat->complete(r.prompt);
        } else {
            return fail("imported answers are loaded from files, not generated");
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    if (!res.deterministic)
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// One QAResult per (question, method); per-cell failures become error
/// records and the run continues.
inline std::vector<QAResult> run_benchmark(const std::vector<Question>& questions,
                                           const std::vector<Method>& methods, const QaResources& res) {
    std::vector<QAResult> out;
    out.reserve(questions.size() * methods.size());
    for (const auto& q : questions)
        for (Method m : methods) out.push_back(answer(q, m, res));
    return out;
}

inline constexpr const char* kRunFormat = "gdeltkg-run";
inline constexpr int kRunFormatVersion = 1;

namespace detail {

inline std::string sanitize_filename(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
    return s;
}

inline nlohmann::json result_to_json(const QAResult& r) {
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& [doc, idx] : r.context_chunks) chunks.push_back({{"doc", doc}, {"i", idx}});
    return {{"question_id", r.question_id}, {"method", r.method_label},  {"prompt", r.prompt},
            {"answer", r.answer},           {"model", r.model},          {"status", r.status},
            {"error", r.error},             {"context_size", r.context_size}, {"truncated", r.truncated},
            {"seconds", r.seconds},         {"context_edges", r.context_edges}, {"context_chunks", chunks}};
}

inline QAResult result_from_json(const nlohmann::json& j) {
    QAResult r;
    r.question_id = j.value("question_id", "");
    r.method_label = j.value("method", "");
    if (r.method_label == "graph_query") r.method = Method::GraphQuery;
    else if (r.method_label == "vector_rag") r.method = Method::VectorRag;
    else r.method = Method::Imported;
    r.prompt = j.value("prompt", "");
    r.answer = j.value("answer", "");
    r.model = j.value("model", "");
    r.status = j.value("status", "ok");
    r.error = j.value("error", "");
    r.context_size = j.value("context_size", 0);
    r.truncated = j.value("truncated", false);
    r.seconds = j.value("seconds", 0.0);
    r.context_edges = j.value("context_edges", std::vector<size_t>{});
    for (const auto& c : j.value("context_chunks", nlohmann::json::array()))
        r.context_chunks.emplace_back(c.value("doc", ""), c.value("i", 0));
    return r;
}

}  // namespace detail

struct RunMeta {
    std::string chat_model, store_embedder;
    size_t k = 5, sentence_cap = 500, chunk_cap = 20;
    bool stub = false;
    std::string created;  // ISO timestamp; fixed epoch in deterministic runs
};

inline void save_run(const std::vector<QAResult>& results, const RunMeta& meta, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "results");
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& r : results) {
        std::string name = detail::sanitize_filename(r.question_id) + "__" +
                           detail::sanitize_filename(r.method_label) + ".json";
        std::ofstream out(fs::path(dir) / "results" / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write run result " + name);
        out << detail::result_to_json(r).dump(2) << "\n";
        cells.push_back({{"question_id", r.question_id}, {"method", r.method_label},
                         {"status", r.status}, {"file", "results/" + name}});
    }
    nlohmann::json manifest{{"format", kRunFormat},
                            {"format_version", kRunFormatVersion},
                            {"created", meta.created},
                            {"chat_model", meta.chat_model},
                            {"store_embedder", meta.store_embedder},
                            {"k", meta.k},
                            {"sentence_cap", meta.sentence_cap},
                            {"chunk_cap", meta.chunk_cap},
                            {"stub", meta.stub},
                            {"cells", cells}};
    std::ofstream out(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write run manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

inline std::vector<QAResult> load_run(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!in) throw std::runtime_error("cannot open run manifest in " + dir);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt run manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != kRunFormat)
        throw std::runtime_error(dir + " is not a run directory");
    std::vector<QAResult> out;
    for (const auto& cell : manifest.value("cells", nlohmann::json::array())) {
        std::ifstream rin(fs::path(dir) / cell.at("file").get<std::string>(), std::ios::binary);
        if (!rin) throw std::runtime_error("missing run result file " + cell.at("file").get<std::string>());
        nlohmann::json rj;
        rin >> rj;
        out.push_back(detail::result_from_json(rj));
    }
    return out;
}

}  // namespace gdeltkg
