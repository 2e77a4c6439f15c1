#pragma once

// Column maps for the three GDELT 2.x tab-delimited tables. The defaults
// follow the published GDELT 2.0 event/mentions codebook and the GKG 2.1
// codebook; a schema file can override indices so feed drift is a config
// change rather than a code change.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <fstream>

#include <nlohmann/json.hpp>

namespace gdeltkg {

inline constexpr const char* kSchemaFormat = "gdeltkg-schema";
inline constexpr int kSchemaFormatVersion = 1;

struct TableSchema {
    std::string name;
    int column_count = 0;
    std::map<std::string, int> columns;

    int col(const std::string& column) const {
        auto it = columns.find(column);
        if (it == columns.end())
            throw std::runtime_error("schema for table '" + name + "' has no column '" + column + "'");
        return it->second;
    }
    std::optional<int> col_opt(const std::string& column) const {
        auto it = columns.find(column);
        if (it == columns.end()) return std::nullopt;
        return it->second;
    }
};

struct SchemaMap {
    std::string version = "gdelt-v2/1";
    TableSchema events;
    TableSchema mentions;
    TableSchema gkg;
};

inline SchemaMap default_schema() {
    SchemaMap s;
    s.events.name = "events";
    s.events.column_count = 61;
    s.events.columns = {
        {"GLOBALEVENTID", 0}, {"Day", 1}, {"MonthYear", 2}, {"Year", 3}, {"FractionDate", 4},
        {"Actor1Code", 5}, {"Actor1Name", 6}, {"Actor1CountryCode", 7}, {"Actor1KnownGroupCode", 8},
        {"Actor1EthnicCode", 9}, {"Actor1Religion1Code", 10}, {"Actor1Religion2Code", 11},
        {"Actor1Type1Code", 12}, {"Actor1Type2Code", 13}, {"Actor1Type3Code", 14},
        {"Actor2Code", 15}, {"Actor2Name", 16}, {"Actor2CountryCode", 17}, {"Actor2KnownGroupCode", 18},
        {"Actor2EthnicCode", 19}, {"Actor2Religion1Code", 20}, {"Actor2Religion2Code", 21},
        {"Actor2Type1Code", 22}, {"Actor2Type2Code", 23}, {"Actor2Type3Code", 24},
        {"IsRootEvent", 25}, {"EventCode", 26}, {"EventBaseCode", 27}, {"EventRootCode", 28},
        {"QuadClass", 29}, {"GoldsteinScale", 30}, {"NumMentions", 31}, {"NumSources", 32},
        {"NumArticles", 33}, {"AvgTone", 34},
        {"Actor1Geo_Type", 35}, {"Actor1Geo_FullName", 36}, {"Actor1Geo_CountryCode", 37},
        {"Actor1Geo_ADM1Code", 38}, {"Actor1Geo_ADM2Code", 39}, {"Actor1Geo_Lat", 40},
        {"Actor1Geo_Long", 41}, {"Actor1Geo_FeatureID", 42},
        {"Actor2Geo_Type", 43}, {"Actor2Geo_FullName", 44}, {"Actor2Geo_CountryCode", 45},
        {"Actor2Geo_ADM1Code", 46}, {"Actor2Geo_ADM2Code", 47}, {"Actor2Geo_Lat", 48},
        {"Actor2Geo_Long", 49}, {"Actor2Geo_FeatureID", 50},
        {"ActionGeo_Type", 51}, {"ActionGeo_FullName", 52}, {"ActionGeo_CountryCode", 53},
        {"ActionGeo_ADM1Code", 54}, {"ActionGeo_ADM2Code", 55}, {"ActionGeo_Lat", 56},
        {"ActionGeo_Long", 57}, {"ActionGeo_FeatureID", 58},
        {"DATEADDED", 59}, {"SOURCEURL", 60},
    };

    s.mentions.name = "mentions";
    s.mentions.column_count = 16;
    s.mentions.columns = {
        {"GLOBALEVENTID", 0}, {"EventTimeDate", 1}, {"MentionTimeDate", 2}, {"MentionType", 3},
        {"MentionSourceName", 4}, {"MentionIdentifier", 5}, {"SentenceID", 6},
        {"Actor1CharOffset", 7}, {"Actor2CharOffset", 8}, {"ActionCharOffset", 9},
        {"InRawText", 10}, {"Confidence", 11}, {"MentionDocLen", 12}, {"MentionDocTone", 13},
        {"MentionDocTranslationInfo", 14}, {"Extras", 15},
    };

    s.gkg.name = "gkg";
    s.gkg.column_count = 27;
    s.gkg.columns = {
        {"GKGRECORDID", 0}, {"DATE", 1}, {"SourceCollectionIdentifier", 2}, {"SourceCommonName", 3},
        {"DocumentIdentifier", 4}, {"Counts", 5}, {"V2Counts", 6}, {"Themes", 7}, {"V2Themes", 8},
        {"Locations", 9}, {"V2Locations", 10}, {"Persons", 11}, {"V2Persons", 12},
        {"Organizations", 13}, {"V2Organizations", 14}, {"V2Tone", 15}, {"Dates", 16},
        {"GCAM", 17}, {"SharingImage", 18}, {"RelatedImages", 19}, {"SocialImageEmbeds", 20},
        {"SocialVideoEmbeds", 21}, {"Quotations", 22}, {"AllNames", 23}, {"Amounts", 24},
        {"TranslationInfo", 25}, {"Extras", 26},
    };
    return s;
}

inline nlohmann::json schema_to_json(const SchemaMap& s) {
    auto table = [](const TableSchema& t) {
        return nlohmann::json{{"column_count", t.column_count}, {"columns", t.columns}};
    };
    return nlohmann::json{
        {"format", kSchemaFormat},
        {"format_version", kSchemaFormatVersion},
        {"version", s.version},
        {"events", table(s.events)},
        {"mentions", table(s.mentions)},
        {"gkg", table(s.gkg)},
    };
}

inline SchemaMap schema_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != kSchemaFormat)
        throw std::runtime_error("not a schema file (format field missing or wrong)");
    int ver = j.value("format_version", 0);
    if (ver != kSchemaFormatVersion)
        throw std::runtime_error("schema file format_version " + std::to_string(ver) +
                                 " unsupported; this build reads version " +
                                 std::to_string(kSchemaFormatVersion));
    SchemaMap s;
    s.version = j.value("version", "");
    auto table = [&](const char* key) {
        TableSchema t;
        t.name = key;
        const auto& tj = j.at(key);
        t.column_count = tj.at("column_count").get<int>();
        t.columns = tj.at("columns").get<std::map<std::string, int>>();
        return t;
    };
    s.events = table("events");
    s.mentions = table("mentions");
    s.gkg = table("gkg");
    return s;
}

inline void save_schema(const SchemaMap& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << schema_to_json(s).dump(2) << "\n";
}

inline SchemaMap load_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt schema file " + path + ": " + e.what());
    }
    return schema_from_json(j);
}

}  // namespace gdeltkg
