#pragma once

// Streaming parsers for the three GDELT tables plus the case-study
// filtration: keep mention rows matching any keyword (and the optional time
// window), then pull in exactly the events and articles those mentions
// reference. Malformed rows never abort a batch; they become error entries.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdeltkg/records.hpp"
#include "gdeltkg/schema.hpp"
#include "gdeltkg/util.hpp"

namespace gdeltkg {

struct ParseError {
    size_t row = 0;  // 1-based input row number
    std::string column;
    std::string reason;
};

template <class Record>
struct ParseResult {
    std::vector<Record> records;
    std::vector<ParseError> errors;
    size_t rows = 0;            // total input rows seen; records + errors == rows
    size_t bytes_replaced = 0;  // invalid UTF-8 bytes replaced with U+FFFD
};

namespace detail {

// Calls fn(row_number, fields) per row. Rows are newline-terminated; a lone
// trailing newline does not produce a phantom row.
template <class Fn>
inline size_t for_each_row(std::istream& in, size_t& bytes_replaced, Fn&& fn) {
    if (!in) throw std::runtime_error("unreadable input stream");
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        ++row;
        bytes_replaced += sanitize_utf8(line);
        fn(row, split(line, '\t'));
    }
    if (in.bad()) throw std::runtime_error("stream read failure");
    return row;
}

inline std::optional<std::string> opt_text(std::string_view cell) {
    auto t = trim(cell);
    if (t.empty()) return std::nullopt;
    return std::string(t);
}

// ';'-separated list; an optional ",offset" suffix per entry is trimmed.
// Exact repeats within the row are dropped, first occurrence kept.
inline std::vector<std::string> parse_code_list(std::string_view cell, bool strip_offset) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto entry : split(cell, ';')) {
        std::string_view e = trim(entry);
        if (strip_offset) {
            size_t comma = e.rfind(',');
            if (comma != std::string_view::npos) {
                auto tail = e.substr(comma + 1);
                if (!tail.empty() && parse_int(tail)) e = trim(e.substr(0, comma));
            }
        }
        if (e.empty()) continue;
        std::string s(e);
        if (seen.insert(s).second) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace detail

inline ParseResult<EventRecord> parse_events(std::istream& in, const TableSchema& schema) {
    ParseResult<EventRecord> result;
    std::unordered_set<int64_t> seen_ids;
    result.rows = detail::for_each_row(in, result.bytes_replaced, [&](size_t row, const std::vector<std::string_view>& f) {
        if (static_cast<int>(f.size()) != schema.column_count) {
            result.errors.push_back({row, "-", "expected " + std::to_string(schema.column_count) +
                                               " columns, got " + std::to_string(f.size())});
            return;
        }
        auto id = parse_int(f[schema.col("GLOBALEVENTID")]);
        if (!id) {
            result.errors.push_back({row, "GLOBALEVENTID", "not an integer"});
            return;
        }
        auto day = parse_int(f[schema.col("Day")]);
        if (!day) {
            result.errors.push_back({row, "Day", "not a date"});
            return;
        }
        if (!seen_ids.insert(*id).second) {
            result.errors.push_back({row, "GLOBALEVENTID", "duplicate GLOBALEVENTID " + std::to_string(*id)});
            return;
        }
        EventRecord r;
        r.global_event_id = *id;
        r.day = *day;
        r.actor1_name = detail::opt_text(f[schema.col("Actor1Name")]);
        r.actor2_name = detail::opt_text(f[schema.col("Actor2Name")]);
        r.actor1_code = detail::opt_text(f[schema.col("Actor1Code")]);
        r.actor2_code = detail::opt_text(f[schema.col("Actor2Code")]);
        r.event_code = std::string(trim(f[schema.col("EventCode")]));
        r.goldstein_scale = parse_double(f[schema.col("GoldsteinScale")]);
        r.num_mentions = parse_int(f[schema.col("NumMentions")]);
        r.avg_tone = parse_double(f[schema.col("AvgTone")]);
        r.action_geo_fullname = detail::opt_text(f[schema.col("ActionGeo_FullName")]);
        r.action_geo_lat = parse_double(f[schema.col("ActionGeo_Lat")]);
        r.action_geo_lon = parse_double(f[schema.col("ActionGeo_Long")]);
        r.source_url = std::string(trim(f[schema.col("SOURCEURL")]));
        if ((r.action_geo_lat && (*r.action_geo_lat < -90.0 || *r.action_geo_lat > 90.0)) ||
            (r.action_geo_lon && (*r.action_geo_lon < -180.0 || *r.action_geo_lon > 180.0)))
            r.geo_out_of_range = true;
        r.raw.assign(f.begin(), f.end());
        result.records.push_back(std::move(r));
    });
    return result;
}

inline ParseResult<MentionRecord> parse_mentions(std::istream& in, const TableSchema& schema) {
    ParseResult<MentionRecord> result;
    std::set<std::pair<int64_t, std::string>> seen;
    result.rows = detail::for_each_row(in, result.bytes_replaced, [&](size_t row, const std::vector<std::string_view>& f) {
        if (static_cast<int>(f.size()) != schema.column_count) {
            result.errors.push_back({row, "-", "expected " + std::to_string(schema.column_count) +
                                               " columns, got " + std::to_string(f.size())});
            return;
        }
        auto id = parse_int(f[schema.col("GLOBALEVENTID")]);
        if (!id) {
            result.errors.push_back({row, "GLOBALEVENTID", "not an integer"});
            return;
        }
        std::string identifier(trim(f[schema.col("MentionIdentifier")]));
        if (identifier.empty()) {
            result.errors.push_back({row, "MentionIdentifier", "empty"});
            return;
        }
        MentionRecord r;
        r.global_event_id = *id;
        r.identifier = std::move(identifier);
        r.mention_time = parse_int(f[schema.col("MentionTimeDate")]).value_or(0);
        r.source_name = std::string(trim(f[schema.col("MentionSourceName")]));
        r.confidence = parse_int(f[schema.col("Confidence")]);
        r.doc_tone = parse_double(f[schema.col("MentionDocTone")]);
        r.duplicate = !seen.insert({r.global_event_id, r.identifier}).second;
        r.raw.assign(f.begin(), f.end());
        result.records.push_back(std::move(r));
    });
    return result;
}

inline ParseResult<ArticleRecord> parse_gkg(std::istream& in, const TableSchema& schema) {
    ParseResult<ArticleRecord> result;
    std::unordered_set<std::string> seen_docs;
    result.rows = detail::for_each_row(in, result.bytes_replaced, [&](size_t row, const std::vector<std::string_view>& f) {
        if (static_cast<int>(f.size()) != schema.column_count) {
            result.errors.push_back({row, "-", "expected " + std::to_string(schema.column_count) +
                                               " columns, got " + std::to_string(f.size())});
            return;
        }
        std::string record_id(trim(f[schema.col("GKGRECORDID")]));
        std::string doc_id(trim(f[schema.col("DocumentIdentifier")]));
        if (record_id.empty()) {
            result.errors.push_back({row, "GKGRECORDID", "empty"});
            return;
        }
        if (doc_id.empty()) {
            result.errors.push_back({row, "DocumentIdentifier", "empty"});
            return;
        }
        if (!seen_docs.insert(doc_id).second) {
            // first occurrence wins
            result.errors.push_back({row, "DocumentIdentifier", "duplicate DocumentIdentifier " + doc_id});
            return;
        }
        ArticleRecord r;
        r.gkg_record_id = std::move(record_id);
        r.document_identifier = std::move(doc_id);
        r.date = parse_int(f[schema.col("DATE")]).value_or(0);
        r.source_common_name = std::string(trim(f[schema.col("SourceCommonName")]));

        auto v2themes = f[schema.col("V2Themes")];
        r.themes = !trim(v2themes).empty() ? detail::parse_code_list(v2themes, true)
                                           : detail::parse_code_list(f[schema.col("Themes")], true);
        auto v1persons = f[schema.col("Persons")];
        r.persons = !trim(v1persons).empty() ? detail::parse_code_list(v1persons, false)
                                             : detail::parse_code_list(f[schema.col("V2Persons")], true);
        auto v1orgs = f[schema.col("Organizations")];
        r.organizations = !trim(v1orgs).empty() ? detail::parse_code_list(v1orgs, false)
                                                : detail::parse_code_list(f[schema.col("V2Organizations")], true);

        // V1LOCATIONS: ';' between entries, '#' between subfields
        // (type#fullname#country#adm1#lat#lon#featureid).
        std::unordered_set<std::string> seen_locs;
        for (auto entry : split(f[schema.col("Locations")], ';')) {
            auto sub = split(entry, '#');
            if (sub.size() < 2) continue;
            GeoRef g;
            g.fullname = std::string(trim(sub[1]));
            if (g.fullname.empty()) continue;
            if (sub.size() > 5) {
                g.lat = parse_double(sub[4]);
                g.lon = parse_double(sub[5]);
            }
            if (seen_locs.insert(g.fullname).second) r.locations.push_back(std::move(g));
        }

        // V2Tone: comma-separated metrics, first is the document tone.
        auto tone_fields = split(f[schema.col("V2Tone")], ',');
        if (!tone_fields.empty()) r.tone = parse_double(tone_fields[0]);

        // V2.1QUOTATIONS: '#' between blocks, '|' between block fields
        // (offset|length|verb|quote).
        for (auto block : split(f[schema.col("Quotations")], '#')) {
            auto parts = split(block, '|');
            if (parts.size() < 4) continue;
            std::string quote = collapse_whitespace(parts[3]);
            if (!quote.empty()) r.quotations.push_back(std::move(quote));
        }

        r.raw.assign(f.begin(), f.end());
        result.records.push_back(std::move(r));
    });
    return result;
}

struct KeywordFilter {
    std::vector<std::string> keywords;
    bool case_sensitive = false;
    std::optional<std::pair<int64_t, int64_t>> time_window;  // inclusive YYYYMMDDHHMMSS bounds
};

struct Provenance {
    std::vector<std::string> sources;
    size_t events_before = 0, mentions_before = 0, articles_before = 0;
    size_t events_after = 0, mentions_after = 0, articles_after = 0;
    double retained_fraction = 0.0;
};

struct CaseStudySubset {
    std::vector<EventRecord> events;
    std::vector<MentionRecord> mentions;
    std::vector<ArticleRecord> articles;
    KeywordFilter filter;
    Provenance provenance;
    std::vector<int64_t> unresolved_event_ids;        // referenced by a kept mention, absent from events
    std::vector<std::string> unresolved_article_ids;  // likewise for articles
};

inline bool mention_matches(const MentionRecord& m, const KeywordFilter& filter) {
    if (filter.time_window) {
        if (m.mention_time < filter.time_window->first || m.mention_time > filter.time_window->second)
            return false;
    }
    // Substring over the tab-joined row text; "Baltimore" matches "baltimore-bridge".
    std::string joined = join(m.raw, "\t");
    for (const auto& kw : filter.keywords) {
        if (filter.case_sensitive ? joined.find(kw) != std::string::npos : icontains(joined, kw))
            return true;
    }
    return false;
}

inline CaseStudySubset filter_subset(const std::vector<EventRecord>& events,
                                     const std::vector<MentionRecord>& mentions,
                                     const std::vector<ArticleRecord>& articles,
                                     const KeywordFilter& filter) {
    if (filter.keywords.empty()) throw std::invalid_argument("filter requires keywords");

    CaseStudySubset out;
    out.filter = filter;
    out.provenance.events_before = events.size();
    out.provenance.mentions_before = mentions.size();
    out.provenance.articles_before = articles.size();

    std::set<int64_t> wanted_events;
    std::set<std::string> wanted_articles;
    for (const auto& m : mentions) {
        if (!mention_matches(m, filter)) continue;
        out.mentions.push_back(m);
        wanted_events.insert(m.global_event_id);
        wanted_articles.insert(m.identifier);
    }
    for (const auto& e : events) {
        if (wanted_events.count(e.global_event_id)) {
            out.events.push_back(e);
            wanted_events.erase(e.global_event_id);
        }
    }
    for (const auto& a : articles) {
        if (wanted_articles.count(a.document_identifier)) {
            out.articles.push_back(a);
            wanted_articles.erase(a.document_identifier);
        }
    }
    out.unresolved_event_ids.assign(wanted_events.begin(), wanted_events.end());
    out.unresolved_article_ids.assign(wanted_articles.begin(), wanted_articles.end());

    out.provenance.events_after = out.events.size();
    out.provenance.mentions_after = out.mentions.size();
    out.provenance.articles_after = out.articles.size();
    size_t before = events.size() + mentions.size() + articles.size();
    size_t after = out.events.size() + out.mentions.size() + out.articles.size();
    out.provenance.retained_fraction = before ? static_cast<double>(after) / static_cast<double>(before) : 0.0;
    return out;
}

struct ConsistencyReport {
    size_t events = 0, mentions = 0, articles = 0;
    std::vector<int64_t> unresolved_event_ids;
    std::vector<std::string> unresolved_article_ids;
    std::vector<std::pair<int64_t, std::string>> duplicate_mentions;

    bool clean() const {
        return unresolved_event_ids.empty() && unresolved_article_ids.empty();
    }
    nlohmann::json to_json() const {
        nlohmann::json dup = nlohmann::json::array();
        for (const auto& [id, url] : duplicate_mentions) dup.push_back({{"global_event_id", id}, {"identifier", url}});
        return {
            {"counts", {{"events", events}, {"mentions", mentions}, {"articles", articles}}},
            {"unresolved_event_ids", unresolved_event_ids},
            {"unresolved_article_ids", unresolved_article_ids},
            {"duplicate_mentions", dup},
        };
    }
    std::string to_text() const {
        std::ostringstream os;
        os << "events: " << events << "\nmentions: " << mentions << "\narticles: " << articles << "\n";
        os << "unresolved event refs: " << unresolved_event_ids.size() << "\n";
        for (auto id : unresolved_event_ids) os << "  event " << id << "\n";
        os << "unresolved article refs: " << unresolved_article_ids.size() << "\n";
        for (const auto& u : unresolved_article_ids) os << "  article " << u << "\n";
        os << "duplicate mentions: " << duplicate_mentions.size() << "\n";
        for (const auto& [id, url] : duplicate_mentions) os << "  (" << id << ", " << url << ")\n";
        return os.str();
    }
};

inline ConsistencyReport consistency_report(const CaseStudySubset& subset) {
    ConsistencyReport rep;
    rep.events = subset.events.size();
    rep.mentions = subset.mentions.size();
    rep.articles = subset.articles.size();

    std::unordered_set<int64_t> event_ids;
    for (const auto& e : subset.events) event_ids.insert(e.global_event_id);
    std::unordered_set<std::string> article_ids;
    for (const auto& a : subset.articles) article_ids.insert(a.document_identifier);

    std::set<int64_t> missing_events;
    std::set<std::string> missing_articles;
    for (const auto& m : subset.mentions) {
        if (!event_ids.count(m.global_event_id)) missing_events.insert(m.global_event_id);
        if (!article_ids.count(m.identifier)) missing_articles.insert(m.identifier);
        if (m.duplicate) rep.duplicate_mentions.emplace_back(m.global_event_id, m.identifier);
    }
    rep.unresolved_event_ids.assign(missing_events.begin(), missing_events.end());
    rep.unresolved_article_ids.assign(missing_articles.begin(), missing_articles.end());
    return rep;
}

inline constexpr const char* kSubsetFormat = "gdeltkg-subset";
inline constexpr int kSubsetFormatVersion = 1;

namespace detail {

inline void write_rows_tsv(const std::string& path, const auto& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& r : records) out << join(r.raw, "\t") << "\n";
}

}  // namespace detail

/// Persists the subset as three row files in original wire format plus a
/// self-describing manifest (embedded schema, filter, provenance).
inline void save_subset(const CaseStudySubset& subset, const SchemaMap& schema, const std::string& dir) {
    std::filesystem::create_directories(dir);
    detail::write_rows_tsv(dir + "/events.tsv", subset.events);
    detail::write_rows_tsv(dir + "/mentions.tsv", subset.mentions);
    detail::write_rows_tsv(dir + "/articles.tsv", subset.articles);

    nlohmann::json filter{{"keywords", subset.filter.keywords}, {"case_sensitive", subset.filter.case_sensitive}};
    if (subset.filter.time_window)
        filter["time_window"] = {subset.filter.time_window->first, subset.filter.time_window->second};
    nlohmann::json manifest{
        {"format", kSubsetFormat},
        {"format_version", kSubsetFormatVersion},
        {"schema", schema_to_json(schema)},
        {"filter", filter},
        {"counts", {{"events", subset.events.size()},
                    {"mentions", subset.mentions.size()},
                    {"articles", subset.articles.size()}}},
        {"provenance", {{"sources", subset.provenance.sources},
                        {"events_before", subset.provenance.events_before},
                        {"mentions_before", subset.provenance.mentions_before},
                        {"articles_before", subset.provenance.articles_before},
                        {"retained_fraction", subset.provenance.retained_fraction}}},
        {"unresolved_event_ids", subset.unresolved_event_ids},
        {"unresolved_article_ids", subset.unresolved_article_ids},
    };
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + dir + "/manifest.json");
    out << manifest.dump(2) << "\n";
}

inline CaseStudySubset load_subset(const std::string& dir) {
    std::ifstream min(dir + "/manifest.json", std::ios::binary);
    if (!min) throw std::runtime_error("cannot open " + dir + "/manifest.json");
    nlohmann::json manifest;
    try {
        min >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt subset manifest in " + dir + ": " + e.what());
    }
    if (manifest.value("format", "") != kSubsetFormat)
        throw std::runtime_error(dir + " is not a subset directory");
    int ver = manifest.value("format_version", 0);
    if (ver != kSubsetFormatVersion)
        throw std::runtime_error("subset format_version " + std::to_string(ver) +
                                 " unsupported; this build reads version " +
                                 std::to_string(kSubsetFormatVersion));
    SchemaMap schema = schema_from_json(manifest.at("schema"));

    auto parse_file = [&](const std::string& path, auto parser, const TableSchema& ts) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path);
        auto res = parser(in, ts);
        if (!res.errors.empty())
            throw std::runtime_error(path + ": " + std::to_string(res.errors.size()) +
                                     " malformed rows in a persisted subset");
        return std::move(res.records);
    };

    CaseStudySubset subset;
    subset.events = parse_file(dir + "/events.tsv", [](std::istream& i, const TableSchema& t) { return parse_events(i, t); }, schema.events);
    subset.mentions = parse_file(dir + "/mentions.tsv", [](std::istream& i, const TableSchema& t) { return parse_mentions(i, t); }, schema.mentions);
    subset.articles = parse_file(dir + "/articles.tsv", [](std::istream& i, const TableSchema& t) { return parse_gkg(i, t); }, schema.gkg);

    const auto& fj = manifest.at("filter");
    subset.filter.keywords = fj.at("keywords").get<std::vector<std::string>>();
    subset.filter.case_sensitive = fj.value("case_sensitive", false);
    if (fj.contains("time_window"))
        subset.filter.time_window = {fj["time_window"][0].get<int64_t>(), fj["time_window"][1].get<int64_t>()};
    if (manifest.contains("provenance")) {
        const auto& pj = manifest["provenance"];
        subset.provenance.sources = pj.value("sources", std::vector<std::string>{});
        subset.provenance.events_before = pj.value("events_before", size_t{0});
        subset.provenance.mentions_before = pj.value("mentions_before", size_t{0});
        subset.provenance.articles_before = pj.value("articles_before", size_t{0});
        subset.provenance.retained_fraction = pj.value("retained_fraction", 0.0);
    }
    subset.provenance.events_after = subset.events.size();
    subset.provenance.mentions_after = subset.mentions.size();
    subset.provenance.articles_after = subset.articles.size();
    subset.unresolved_event_ids = manifest.value("unresolved_event_ids", std::vector<int64_t>{});
    subset.unresolved_article_ids = manifest.value("unresolved_article_ids", std::vector<std::string>{});
    return subset;
}

}  // namespace gdeltkg
