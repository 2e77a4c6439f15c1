#pragma once

// Keyword-driven retrieval over the DKG: every edge renders as one triple
// sentence, keyword hits select edges, and the result is the edge-induced
// subgraph. Aggregate queries (per-source article counts, theme ranking,
// mention attribution) answer the dataset-level questions.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdeltkg/graph.hpp"
#include "gdeltkg/util.hpp"

namespace gdeltkg {

struct TripleSentence {
    size_t edge_id = 0;
    std::string sentence;
};

/// Relation phrase for rendering: label with underscores as spaces.
inline std::string relation_phrase(std::string_view edge_label) {
    return replace_all(std::string(edge_label), "_", " ");
}

inline std::string render_sentence(const KnowledgeGraph& kg, size_t edge_id) {
    const Edge& e = kg.edge(edge_id);
    return kg.node(e.src).label + " " + relation_phrase(kg.edge_label(e)) + " " + kg.node(e.dst).label;
}

/// One sentence per edge, in edge order.
inline std::vector<TripleSentence> triples_to_sentences(const KnowledgeGraph& kg) {
    std::vector<TripleSentence> out;
    out.reserve(kg.edge_count());
    for (size_t i = 0; i < kg.edge_count(); ++i) out.push_back({i, render_sentence(kg, i)});
    return out;
}

// Keyword matching treats '_' and ' ' as equivalent on both sides so that a
// keyword like "Has_Theme" hits the rendered phrase "has theme" while
// "MARITIME_INCIDENT" still hits the label text it appears in.
inline std::string normalize_for_match(std::string_view s) {
    std::string out = to_lower(s);
    for (char& c : out)
        if (c == '_') c = ' ';
    return out;
}

inline bool sentence_matches(std::string_view sentence, const std::vector<std::string>& keywords) {
    std::string norm = normalize_for_match(sentence);
    for (const auto& kw : keywords)
        if (norm.find(normalize_for_match(kw)) != std::string::npos) return true;
    return false;
}

/// Edge-induced subgraph: a selected edge set plus exactly its endpoints.
struct Subgraph {
    const KnowledgeGraph* parent = nullptr;
    std::vector<size_t> edge_ids;    // ascending
    std::vector<uint32_t> node_ids;  // ascending, endpoint union

    std::vector<std::string> sentences() const {
        std::vector<std::string> out;
        out.reserve(edge_ids.size());
        for (size_t id : edge_ids) out.push_back(render_sentence(*parent, id));
        return out;
    }
};

inline Subgraph make_subgraph(const KnowledgeGraph& kg, std::vector<size_t> edge_ids) {
    std::sort(edge_ids.begin(), edge_ids.end());
    edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
    std::set<uint32_t> nodes;
    for (size_t id : edge_ids) {
        nodes.insert(kg.edge(id).src);
        nodes.insert(kg.edge(id).dst);
    }
    Subgraph sg;
    sg.parent = &kg;
    sg.edge_ids = std::move(edge_ids);
    sg.node_ids.assign(nodes.begin(), nodes.end());
    return sg;
}

inline Subgraph keyword_edge_search(const KnowledgeGraph& kg, const std::vector<std::string>& keywords) {
    if (keywords.empty()) throw std::invalid_argument("keyword search requires keywords");
    std::vector<size_t> hits;
    for (size_t i = 0; i < kg.edge_count(); ++i)
        if (sentence_matches(render_sentence(kg, i), keywords)) hits.push_back(i);
    return make_subgraph(kg, std::move(hits));
}

/// Standalone copy of a subgraph (for export); node/edge order follows the
/// parent's, so output is deterministic.
inline KnowledgeGraph materialize(const Subgraph& sg) {
    const KnowledgeGraph& kg = *sg.parent;
    KnowledgeGraph out(kg.ontology());
    std::map<uint32_t, uint32_t> remap;
    for (uint32_t id : sg.node_ids) {
        const Node& n = kg.node(id);
        remap[id] = out.add_node(n.type, n.key, n.label, n.attrs);
    }
    for (size_t id : sg.edge_ids) {
        const Edge& e = kg.edge(id);
        out.add_edge(kg.edge_label(e), remap[e.src], remap[e.dst], e.attrs);
    }
    return out;
}

/// Distinct articles published by sources whose label contains the pattern
/// (case-insensitive substring).
inline size_t count_articles_by_source(const KnowledgeGraph& kg, std::string_view source_pattern) {
    auto label_id = kg.ontology().find("published_by");
    if (!label_id) return 0;
    std::set<uint32_t> articles;
    for (const auto& e : kg.edges()) {
        if (e.label != *label_id) continue;
        if (icontains(kg.node(e.dst).label, source_pattern)) articles.insert(e.src);
    }
    return articles.size();
}

/// Themes ranked by incident has_theme edge count, descending; ties break
/// lexicographically on the theme code.
inline std::vector<std::pair<std::string, size_t>> top_themes(const KnowledgeGraph& kg, size_t k) {
    if (k < 1) throw std::invalid_argument("top_themes requires k >= 1");
    auto label_id = kg.ontology().find("has_theme");
    std::map<uint32_t, size_t> counts;
    if (label_id)
        for (const auto& e : kg.edges())
            if (e.label == *label_id) ++counts[e.dst];
    std::vector<std::pair<std::string, size_t>> ranked;
    ranked.reserve(counts.size());
    for (const auto& [node_id, count] : counts) ranked.emplace_back(kg.node(node_id).label, count);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

struct AttributionResult {
    std::vector<std::string> articles;  // document identifiers, sorted
    size_t attribution_count = 0;
};

/// Articles attributed to a person/organization entity via
/// mentions_person / mentions_organization edges. Unknown entity -> empty.
inline AttributionResult mention_attribution(const KnowledgeGraph& kg, std::string_view entity_label) {
    if (trim(entity_label).empty()) throw std::invalid_argument("entity label required");
    std::set<uint32_t> entity_nodes;
    for (uint32_t id : kg.find_by_label(entity_label)) {
        NodeType t = kg.node(id).type;
        if (t == NodeType::Person || t == NodeType::Organization) entity_nodes.insert(id);
    }
    AttributionResult result;
    if (entity_nodes.empty()) return result;
    auto person_label = kg.ontology().find("mentions_person");
    auto org_label = kg.ontology().find("mentions_organization");
    std::set<std::string> articles;
    for (const auto& e : kg.edges()) {
        bool relevant = (person_label && e.label == *person_label) || (org_label && e.label == *org_label);
        if (!relevant || !entity_nodes.count(e.dst)) continue;
        articles.insert(kg.node(e.src).label);
    }
    result.articles.assign(articles.begin(), articles.end());
    result.attribution_count = result.articles.size();
    return result;
}

/// Edge-induced subgraph of all edges on paths of length <= radius from the
/// node (treating edges as undirected for traversal).
inline Subgraph neighborhood(const KnowledgeGraph& kg, std::string_view node_key, size_t radius) {
    auto start = kg.find_node(node_key);
    if (!start) throw std::runtime_error("unknown node: " + std::string(node_key));
    std::map<uint32_t, size_t> dist{{*start, 0}};
    std::deque<uint32_t> frontier{*start};
    std::vector<size_t> edges;
    while (!frontier.empty()) {
        uint32_t u = frontier.front();
        frontier.pop_front();
        size_t du = dist[u];
        if (du >= radius) continue;
        for (size_t edge_id : kg.edges_of(u)) {
            const Edge& e = kg.edge(edge_id);
            uint32_t v = e.src == u ? e.dst : e.src;
            edges.push_back(edge_id);
            if (!dist.count(v)) {
                dist[v] = du + 1;
                frontier.push_back(v);
            }
        }
    }
    return make_subgraph(kg, std::move(edges));
}

}  // namespace gdeltkg
