#pragma once

// Typed property graph: nodes carry one NodeType, edges carry an ontology
// label with a fixed (source type, target type) signature. Row nodes are
// keyed by their table identity; value nodes deduplicate on
// (type, normalized label) so stars link over shared values across tables.

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdeltkg/util.hpp"

namespace gdeltkg {

enum class NodeType : uint8_t {
    Event, Mention, Article, Actor, EventCode, Theme,
    Person, Organization, Location, Source, Quotation, DateValue,
};

inline constexpr std::array<std::string_view, 12> kNodeTypeNames = {
    "Event", "Mention", "Article", "Actor", "EventCode", "Theme",
    "Person", "Organization", "Location", "Source", "Quotation", "DateValue",
};

inline std::string_view node_type_name(NodeType t) { return kNodeTypeNames[static_cast<size_t>(t)]; }

inline NodeType node_type_from_name(std::string_view name) {
    for (size_t i = 0; i < kNodeTypeNames.size(); ++i)
        if (kNodeTypeNames[i] == name) return static_cast<NodeType>(i);
    throw std::runtime_error("unknown node type: " + std::string(name));
}

struct EdgeTypeSpec {
    std::string label;
    NodeType source;
    NodeType target;
};

/// Allowed edge labels and their endpoint-type signatures. Extensible: a
/// corrected or enriched ontology is data, not code.
class Ontology {
public:
    static Ontology standard() {
        Ontology o;
        o.add("mentioned_in", NodeType::Event, NodeType::Mention);
        o.add("appears_in", NodeType::Mention, NodeType::Article);
        o.add("has_actor1", NodeType::Event, NodeType::Actor);
        o.add("has_actor2", NodeType::Event, NodeType::Actor);
        o.add("has_event_code", NodeType::Event, NodeType::EventCode);
        o.add("occurred_at", NodeType::Event, NodeType::Location);
        o.add("occurred_on", NodeType::Event, NodeType::DateValue);
        o.add("has_theme", NodeType::Article, NodeType::Theme);
        o.add("mentions_person", NodeType::Article, NodeType::Person);
        o.add("mentions_organization", NodeType::Article, NodeType::Organization);
        o.add("mentions_location", NodeType::Article, NodeType::Location);
        o.add("published_by", NodeType::Article, NodeType::Source);
        o.add("has_quotation", NodeType::Article, NodeType::Quotation);
        o.add("published_on", NodeType::Article, NodeType::DateValue);
        return o;
    }

    uint16_t add(std::string_view label, NodeType source, NodeType target) {
        auto it = by_label_.find(std::string(label));
        if (it != by_label_.end()) {
            const auto& spec = types_[it->second];
            if (spec.source != source || spec.target != target)
                throw std::runtime_error("edge label '" + std::string(label) +
                                         "' already registered with a different signature");
            return it->second;
        }
        types_.push_back({std::string(label), source, target});
        uint16_t id = static_cast<uint16_t>(types_.size() - 1);
        by_label_[types_.back().label] = id;
        return id;
    }

    std::optional<uint16_t> find(std::string_view label) const {
        auto it = by_label_.find(std::string(label));
        if (it == by_label_.end()) return std::nullopt;
        return it->second;
    }
    uint16_t id(std::string_view label) const {
        auto found = find(label);
        if (!found) throw std::runtime_error("unknown edge label: " + std::string(label));
        return *found;
    }
    const EdgeTypeSpec& at(uint16_t id) const { return types_.at(id); }
    size_t size() const { return types_.size(); }
    const std::vector<EdgeTypeSpec>& types() const { return types_; }

private:
    std::vector<EdgeTypeSpec> types_;
    std::map<std::string, uint16_t> by_label_;
};

using AttrValue = std::variant<int64_t, double, std::string>;
using AttrMap = std::map<std::string, AttrValue>;

struct Node {
    std::string key;    // unique; row nodes by table identity, value nodes "v:Type:normlabel"
    NodeType type;
    std::string label;  // display text (first-seen form for value nodes)
    AttrMap attrs;
};

struct Edge {
    uint32_t src = 0;
    uint32_t dst = 0;
    uint16_t label = 0;
    AttrMap attrs;
};

class KnowledgeGraph {
public:
    KnowledgeGraph() : ontology_(Ontology::standard()) {}
    explicit KnowledgeGraph(Ontology ontology) : ontology_(std::move(ontology)) {}

    Ontology& ontology() { return ontology_; }
    const Ontology& ontology() const { return ontology_; }

    uint32_t add_node(NodeType type, std::string key, std::string label, AttrMap attrs = {}) {
        if (by_key_.count(key)) throw std::runtime_error("duplicate node key: " + key);
        uint32_t id = static_cast<uint32_t>(nodes_.size());
        by_key_[key] = id;
        by_norm_label_[normalize_label(label)].push_back(id);
        nodes_.push_back({std::move(key), type, std::move(label), std::move(attrs)});
        adjacency_.emplace_back();
        return id;
    }

    /// Deduplicating accessor for value nodes: one node per
    /// (type, normalized label), display form is first seen.
    uint32_t ensure_value_node(NodeType type, std::string_view label) {
        std::string norm = normalize_label(label);
        std::string key = "v:" + std::string(node_type_name(type)) + ":" + norm;
        auto it = by_key_.find(key);
        if (it != by_key_.end()) return it->second;
        return add_node(type, std::move(key), collapse_whitespace(label));
    }

    size_t add_edge(std::string_view label, uint32_t src, uint32_t dst, AttrMap attrs = {}) {
        uint16_t label_id = ontology_.id(label);
        const auto& spec = ontology_.at(label_id);
        if (src >= nodes_.size() || dst >= nodes_.size())
            throw std::runtime_error("edge endpoint out of range");
        if (nodes_[src].type != spec.source || nodes_[dst].type != spec.target)
            throw std::runtime_error(
                "edge '" + spec.label + "' requires (" + std::string(node_type_name(spec.source)) + " -> " +
                std::string(node_type_name(spec.target)) + "), got (" +
                std::string(node_type_name(nodes_[src].type)) + " -> " +
                std::string(node_type_name(nodes_[dst].type)) + ")");
        size_t id = edges_.size();
        edges_.push_back({src, dst, label_id, std::move(attrs)});
        adjacency_[src].push_back(id);
        if (dst != src) adjacency_[dst].push_back(id);
        return id;
    }

    std::optional<uint32_t> find_node(std::string_view key) const {
        auto it = by_key_.find(std::string(key));
        if (it == by_key_.end()) return std::nullopt;
        return it->second;
    }
    std::vector<uint32_t> find_by_label(std::string_view label) const {
        auto it = by_norm_label_.find(normalize_label(label));
        if (it == by_norm_label_.end()) return {};
        return it->second;
    }

    const Node& node(uint32_t id) const { return nodes_.at(id); }
    const Edge& edge(size_t id) const { return edges_.at(id); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<size_t>& edges_of(uint32_t node_id) const { return adjacency_.at(node_id); }

    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edges_.size(); }

    std::vector<uint32_t> nodes_of_type(NodeType t) const {
        std::vector<uint32_t> out;
        for (uint32_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].type == t) out.push_back(i);
        return out;
    }

    const std::string& edge_label(const Edge& e) const { return ontology_.at(e.label).label; }

private:
    Ontology ontology_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<size_t>> adjacency_;
    std::unordered_map<std::string, uint32_t> by_key_;
    std::unordered_map<std::string, std::vector<uint32_t>> by_norm_label_;
};

inline constexpr const char* kGraphFormat = "gdeltkg-graph";
inline constexpr int kGraphFormatVersion = 1;

namespace detail {

inline nlohmann::json attrs_to_json(const AttrMap& attrs) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : attrs) {
        std::visit([&](const auto& value) { j[k] = value; }, v);
    }
    return j;
}

inline AttrMap attrs_from_json(const nlohmann::json& j) {
    AttrMap attrs;
    for (const auto& [k, v] : j.items()) {
        if (v.is_number_integer()) attrs[k] = v.get<int64_t>();
        else if (v.is_number_float()) attrs[k] = v.get<double>();
        else if (v.is_string()) attrs[k] = v.get<std::string>();
        else throw std::runtime_error("unsupported attribute type for '" + k + "'");
    }
    return attrs;
}

}  // namespace detail

inline nlohmann::json graph_to_json(const KnowledgeGraph& kg) {
    nlohmann::json ontology = nlohmann::json::array();
    for (const auto& t : kg.ontology().types())
        ontology.push_back({{"label", t.label},
                            {"source", std::string(node_type_name(t.source))},
                            {"target", std::string(node_type_name(t.target))}});
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : kg.nodes())
        nodes.push_back({{"key", n.key},
                         {"type", std::string(node_type_name(n.type))},
                         {"label", n.label},
                         {"attrs", detail::attrs_to_json(n.attrs)}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : kg.edges())
        edges.push_back({e.src, e.dst, e.label, detail::attrs_to_json(e.attrs)});
    return {{"format", kGraphFormat},
            {"format_version", kGraphFormatVersion},
            {"ontology", ontology},
            {"nodes", nodes},
            {"edges", edges}};
}

inline KnowledgeGraph graph_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != kGraphFormat)
        throw std::runtime_error("not a graph file (format field missing or wrong)");
    int ver = j.value("format_version", 0);
    if (ver != kGraphFormatVersion)
        throw std::runtime_error("graph file format_version " + std::to_string(ver) +
                                 " unsupported; this build reads version " +
                                 std::to_string(kGraphFormatVersion));
    Ontology ontology;
    for (const auto& t : j.at("ontology"))
        ontology.add(t.at("label").get<std::string>(),
                     node_type_from_name(t.at("source").get<std::string>()),
                     node_type_from_name(t.at("target").get<std::string>()));
    KnowledgeGraph kg(std::move(ontology));
    for (const auto& n : j.at("nodes"))
        kg.add_node(node_type_from_name(n.at("type").get<std::string>()),
                    n.at("key").get<std::string>(), n.at("label").get<std::string>(),
                    detail::attrs_from_json(n.value("attrs", nlohmann::json::object())));
    for (const auto& e : j.at("edges")) {
        uint32_t src = e.at(0).get<uint32_t>();
        uint32_t dst = e.at(1).get<uint32_t>();
        uint16_t label = e.at(2).get<uint16_t>();
        kg.add_edge(kg.ontology().at(label).label, src, dst,
                    detail::attrs_from_json(e.size() > 3 ? e.at(3) : nlohmann::json::object()));
    }
    return kg;
}

inline void save_graph(const KnowledgeGraph& kg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << graph_to_json(kg).dump() << "\n";
}

inline KnowledgeGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt graph file " + path + ": " + e.what());
    }
    return graph_from_json(j);
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string attr_to_string(const AttrValue& v) {
    return std::visit(
        [](const auto& value) -> std::string {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, std::string>) return value;
            else if constexpr (std::is_same_v<T, double>) {
                std::ostringstream os;
                os << value;
                return os.str();
            } else return std::to_string(value);
        },
        v);
}

}  // namespace detail

/// GraphML document with node type/label and flattened attributes; node
/// ordering is stable (by internal id) so exports are deterministic.
inline std::string export_graphml(const KnowledgeGraph& kg) {
    std::map<std::string, int> attr_keys;  // sorted -> deterministic key ids
    for (const auto& n : kg.nodes())
        for (const auto& [k, _] : n.attrs) attr_keys.emplace(k, 0);
    int next = 0;
    for (auto& [_, id] : attr_keys) id = next++;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    os << "  <key id=\"ntype\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n";
    os << "  <key id=\"nlabel\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n";
    os << "  <key id=\"nkey\" for=\"node\" attr.name=\"key\" attr.type=\"string\"/>\n";
    os << "  <key id=\"elabel\" for=\"edge\" attr.name=\"label\" attr.type=\"string\"/>\n";
    for (const auto& [name, id] : attr_keys)
        os << "  <key id=\"a" << id << "\" for=\"node\" attr.name=\"" << detail::xml_escape(name)
           << "\" attr.type=\"string\"/>\n";
    os << "  <graph id=\"G\" edgedefault=\"directed\">\n";
    for (uint32_t i = 0; i < kg.nodes().size(); ++i) {
        const auto& n = kg.node(i);
        os << "    <node id=\"n" << i << "\">";
        os << "<data key=\"ntype\">" << node_type_name(n.type) << "</data>";
        os << "<data key=\"nlabel\">" << detail::xml_escape(n.label) << "</data>";
        os << "<data key=\"nkey\">" << detail::xml_escape(n.key) << "</data>";
        for (const auto& [k, v] : n.attrs)
            os << "<data key=\"a" << attr_keys[k] << "\">" << detail::xml_escape(detail::attr_to_string(v))
               << "</data>";
        os << "</node>\n";
    }
    for (size_t i = 0; i < kg.edges().size(); ++i) {
        const auto& e = kg.edge(i);
        os << "    <edge id=\"e" << i << "\" source=\"n" << e.src << "\" target=\"n" << e.dst << "\">";
        os << "<data key=\"elabel\">" << detail::xml_escape(kg.edge_label(e)) << "</data>";
        os << "</edge>\n";
    }
    os << "  </graph>\n</graphml>\n";
    return os.str();
}

/// One line per edge: "<source label>\t<edge label>\t<target label>".
inline std::string export_edge_list(const KnowledgeGraph& kg) {
    std::ostringstream os;
    for (const auto& e : kg.edges())
        os << kg.node(e.src).label << "\t" << kg.edge_label(e) << "\t" << kg.node(e.dst).label << "\n";
    return os.str();
}

}  // namespace gdeltkg
