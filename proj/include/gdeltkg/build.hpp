#pragma once

// DKG materialization. Each table row becomes one row node plus one labeled
// edge per planned value field ("star"); stars from all three tables merge
// into one graph, linking over shared values. Structural edges then connect
// Event -> Mention (shared GLOBALEVENTID) and Mention -> Article
// (MentionIdentifier = DocumentIdentifier).

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gdeltkg/graph.hpp"
#include "gdeltkg/ingest.hpp"
#include "gdeltkg/records.hpp"

namespace gdeltkg {

using FieldValue = std::variant<std::string, std::vector<std::string>, int64_t, double>;
using RowMap = std::map<std::string, FieldValue>;

struct FieldPlan {
    struct Entry {
        enum class Kind { ValueNode, Attribute, Skip } kind = Kind::Skip;
        NodeType value_type = NodeType::Theme;  // for ValueNode
        std::string edge_label;                 // for ValueNode
    };
    // Ordered: spoke edges are emitted in plan order.
    std::vector<std::pair<std::string, Entry>> fields;

    FieldPlan& value_node(std::string column, NodeType type, std::string edge_label) {
        fields.push_back({std::move(column), {Entry::Kind::ValueNode, type, std::move(edge_label)}});
        return *this;
    }
    FieldPlan& attribute(std::string column) {
        fields.push_back({std::move(column), {Entry::Kind::Attribute, NodeType::Theme, ""}});
        return *this;
    }
    FieldPlan& skip(std::string column) {
        fields.push_back({std::move(column), {Entry::Kind::Skip, NodeType::Theme, ""}});
        return *this;
    }
};

struct StarSpoke {
    std::string edge_label;
    NodeType value_type;
    std::string value;  // display text, non-empty
};

struct StarFragment {
    NodeType row_type;
    std::string row_key;
    std::string row_label;
    AttrMap attrs;
    std::vector<StarSpoke> spokes;
};

namespace detail {

inline std::string field_value_text(const FieldValue& v) {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    if (auto* i = std::get_if<int64_t>(&v)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&v)) {
        std::ostringstream os;
        os << *d;
        return os.str();
    }
    return {};
}

}  // namespace detail

/// One row into one star. Planned value columns emit one spoke per non-empty
/// element; planned attribute columns land in the row node's attribute map.
inline StarFragment row_to_star(const RowMap& row, NodeType row_type, const std::string& row_key,
                                const std::string& row_label, const FieldPlan& plan) {
    StarFragment frag;
    frag.row_type = row_type;
    frag.row_key = row_key;
    frag.row_label = row_label;
    for (const auto& [column, entry] : plan.fields) {
        auto it = row.find(column);
        if (it == row.end())
            throw std::runtime_error("field plan references unknown column '" + column + "'");
        if (entry.kind == FieldPlan::Entry::Kind::Skip) continue;
        if (entry.kind == FieldPlan::Entry::Kind::Attribute) {
            std::visit(
                [&](const auto& value) {
                    using T = std::decay_t<decltype(value)>;
                    if constexpr (std::is_same_v<T, std::string>) {
                        if (!value.empty()) frag.attrs[column] = value;
                    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
                        if (!value.empty()) frag.attrs[column] = join(value, ";");
                    } else {
                        frag.attrs[column] = value;
                    }
                },
                it->second);
            continue;
        }
        auto add_spoke = [&](const std::string& text) {
            if (trim(text).empty()) return;
            frag.spokes.push_back({entry.edge_label, entry.value_type, collapse_whitespace(text)});
        };
        if (auto* list = std::get_if<std::vector<std::string>>(&it->second)) {
            for (const auto& element : *list) add_spoke(element);
        } else {
            add_spoke(detail::field_value_text(it->second));
        }
    }
    return frag;
}

// --- default plans and row maps for the three GDELT tables ---

inline FieldPlan event_field_plan() {
    FieldPlan p;
    p.value_node("Actor1Name", NodeType::Actor, "has_actor1")
        .value_node("Actor2Name", NodeType::Actor, "has_actor2")
        .value_node("EventCode", NodeType::EventCode, "has_event_code")
        .value_node("ActionGeo_FullName", NodeType::Location, "occurred_at")
        .value_node("Day", NodeType::DateValue, "occurred_on")
        .attribute("Actor1Code")
        .attribute("Actor2Code")
        .attribute("GoldsteinScale")
        .attribute("NumMentions")
        .attribute("AvgTone")
        .attribute("ActionGeo_Lat")
        .attribute("ActionGeo_Long")
        .attribute("SOURCEURL");
    return p;
}

inline FieldPlan mention_field_plan() {
    FieldPlan p;
    p.attribute("MentionTimeDate").attribute("MentionSourceName").attribute("Confidence").attribute("MentionDocTone");
    return p;
}

inline FieldPlan article_field_plan() {
    FieldPlan p;
    p.value_node("SourceCommonName", NodeType::Source, "published_by")
        .value_node("Themes", NodeType::Theme, "has_theme")
        .value_node("Persons", NodeType::Person, "mentions_person")
        .value_node("Organizations", NodeType::Organization, "mentions_organization")
        .value_node("Locations", NodeType::Location, "mentions_location")
        .value_node("Quotations", NodeType::Quotation, "has_quotation")
        .value_node("DATE", NodeType::DateValue, "published_on")
        .attribute("GKGRECORDID")
        .attribute("Tone");
    return p;
}

inline RowMap event_row_map(const EventRecord& e) {
    RowMap row;
    row["Actor1Name"] = e.actor1_name.value_or("");
    row["Actor2Name"] = e.actor2_name.value_or("");
    row["EventCode"] = e.event_code;
    row["ActionGeo_FullName"] = e.action_geo_fullname.value_or("");
    row["Day"] = e.day ? yyyymmdd_to_iso(e.day) : std::string{};
    row["Actor1Code"] = e.actor1_code.value_or("");
    row["Actor2Code"] = e.actor2_code.value_or("");
    if (e.goldstein_scale) row["GoldsteinScale"] = *e.goldstein_scale; else row["GoldsteinScale"] = std::string{};
    if (e.num_mentions) row["NumMentions"] = *e.num_mentions; else row["NumMentions"] = std::string{};
    if (e.avg_tone) row["AvgTone"] = *e.avg_tone; else row["AvgTone"] = std::string{};
    if (e.action_geo_lat) row["ActionGeo_Lat"] = *e.action_geo_lat; else row["ActionGeo_Lat"] = std::string{};
    if (e.action_geo_lon) row["ActionGeo_Long"] = *e.action_geo_lon; else row["ActionGeo_Long"] = std::string{};
    row["SOURCEURL"] = e.source_url;
    return row;
}

inline RowMap mention_row_map(const MentionRecord& m) {
    RowMap row;
    row["MentionTimeDate"] = m.mention_time;
    row["MentionSourceName"] = m.source_name;
    if (m.confidence) row["Confidence"] = *m.confidence; else row["Confidence"] = std::string{};
    if (m.doc_tone) row["MentionDocTone"] = *m.doc_tone; else row["MentionDocTone"] = std::string{};
    return row;
}

inline RowMap article_row_map(const ArticleRecord& a) {
    RowMap row;
    row["SourceCommonName"] = a.source_common_name;
    row["Themes"] = a.themes;
    row["Persons"] = a.persons;
    row["Organizations"] = a.organizations;
    std::vector<std::string> locs;
    for (const auto& l : a.locations) locs.push_back(l.fullname);
    row["Locations"] = locs;
    row["Quotations"] = a.quotations;
    row["DATE"] = a.date ? yyyymmdd_to_iso(timestamp_date_part(a.date)) : std::string{};
    row["GKGRECORDID"] = a.gkg_record_id;
    if (a.tone) row["Tone"] = *a.tone; else row["Tone"] = std::string{};
    return row;
}

inline std::string event_node_key(int64_t global_event_id) {
    return "event:" + std::to_string(global_event_id);
}
inline std::string mention_node_key(int64_t global_event_id, const std::string& identifier) {
    return "mention:" + std::to_string(global_event_id) + "|" + identifier;
}
inline std::string article_node_key(const std::string& document_identifier) {
    return "article:" + document_identifier;
}

struct BuildOptions {
    bool skip_unresolved = false;
};

struct BuildReport {
    size_t row_nodes = 0, value_nodes = 0;
    size_t structural_edges = 0, spoke_edges = 0;
    size_t duplicate_rows_skipped = 0;
    size_t skipped_event_refs = 0, skipped_article_refs = 0;
};

namespace detail {

inline void merge_star(KnowledgeGraph& kg, const StarFragment& frag, BuildReport& report) {
    if (kg.find_node(frag.row_key)) {
        ++report.duplicate_rows_skipped;
        return;
    }
    uint32_t row = kg.add_node(frag.row_type, frag.row_key, frag.row_label, frag.attrs);
    ++report.row_nodes;
    for (const auto& spoke : frag.spokes) {
        size_t before = kg.node_count();
        uint32_t value = kg.ensure_value_node(spoke.value_type, spoke.value);
        if (kg.node_count() > before) ++report.value_nodes;
        kg.add_edge(spoke.edge_label, row, value);
        ++report.spoke_edges;
    }
}

}  // namespace detail

/// Builds the direct KG from a subset. Refuses unresolved references unless
/// `skip_unresolved` is set, in which case skipped links are tallied.
inline KnowledgeGraph build_dkg(const CaseStudySubset& subset, const BuildOptions& opts = {},
                                BuildReport* report_out = nullptr) {
    if (!opts.skip_unresolved &&
        (!subset.unresolved_event_ids.empty() || !subset.unresolved_article_ids.empty())) {
        throw std::runtime_error(
            "subset has " + std::to_string(subset.unresolved_event_ids.size()) + " unresolved event and " +
            std::to_string(subset.unresolved_article_ids.size()) +
            " unresolved article references; rerun with skip-unresolved to build anyway");
    }

    KnowledgeGraph kg;
    BuildReport report;
    const FieldPlan event_plan = event_field_plan();
    const FieldPlan mention_plan = mention_field_plan();
    const FieldPlan article_plan = article_field_plan();

    for (const auto& e : subset.events) {
        std::string id = std::to_string(e.global_event_id);
        detail::merge_star(kg, row_to_star(event_row_map(e), NodeType::Event, event_node_key(e.global_event_id), id, event_plan), report);
    }
    for (const auto& m : subset.mentions) {
        std::string label = std::to_string(m.global_event_id) + "|" + m.identifier;
        detail::merge_star(kg,
                           row_to_star(mention_row_map(m), NodeType::Mention,
                                       mention_node_key(m.global_event_id, m.identifier), label, mention_plan),
                           report);
    }
    for (const auto& a : subset.articles) {
        detail::merge_star(kg,
                           row_to_star(article_row_map(a), NodeType::Article,
                                       article_node_key(a.document_identifier), a.document_identifier, article_plan),
                           report);
    }

    // Structural one-to-many links through the mentions pairs table.
    std::set<std::pair<int64_t, std::string>> linked;
    for (const auto& m : subset.mentions) {
        if (!linked.insert({m.global_event_id, m.identifier}).second) continue;
        auto mention = kg.find_node(mention_node_key(m.global_event_id, m.identifier));
        auto event = kg.find_node(event_node_key(m.global_event_id));
        auto article = kg.find_node(article_node_key(m.identifier));
        if (event && mention) {
            kg.add_edge("mentioned_in", *event, *mention);
            ++report.structural_edges;
        } else {
            ++report.skipped_event_refs;
        }
        if (mention && article) {
            kg.add_edge("appears_in", *mention, *article);
            ++report.structural_edges;
        } else {
            ++report.skipped_article_refs;
        }
    }

    if (report_out) *report_out = report;
    return kg;
}

}  // namespace gdeltkg
