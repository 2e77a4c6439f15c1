#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdeltkg/util.hpp"

namespace gdeltkg {

/// One row of the events table. Optional numerics stay absent when the cell
/// is empty or unparseable; only the identifying fields are hard requirements.
struct EventRecord {
    int64_t global_event_id = 0;
    int64_t day = 0;  // YYYYMMDD
    std::optional<std::string> actor1_name, actor2_name;
    std::optional<std::string> actor1_code, actor2_code;
    std::string event_code;
    std::optional<double> goldstein_scale;
    std::optional<int64_t> num_mentions;
    std::optional<double> avg_tone;
    std::optional<std::string> action_geo_fullname;
    std::optional<double> action_geo_lat, action_geo_lon;
    std::string source_url;
    bool geo_out_of_range = false;  // lat/lon outside valid degrees; record kept, flagged
    std::vector<std::string> raw;

    std::string day_iso() const { return yyyymmdd_to_iso(day); }
};

/// One row of the mentions table. Identity is (global_event_id, identifier).
struct MentionRecord {
    int64_t global_event_id = 0;
    int64_t mention_time = 0;  // YYYYMMDDHHMMSS
    std::string source_name;
    std::string identifier;
    std::optional<int64_t> confidence;
    std::optional<double> doc_tone;
    bool duplicate = false;  // an earlier row in the batch had the same identity pair
    std::vector<std::string> raw;
};

struct GeoRef {
    std::string fullname;
    std::optional<double> lat, lon;
};

/// One row of the GKG table; one row is one article.
struct ArticleRecord {
    std::string gkg_record_id;
    int64_t date = 0;  // YYYYMMDDHHMMSS
    std::string source_common_name;
    std::string document_identifier;
    std::vector<std::string> themes;
    std::vector<std::string> persons;
    std::vector<std::string> organizations;
    std::vector<GeoRef> locations;
    std::optional<double> tone;
    std::vector<std::string> quotations;
    std::vector<std::string> raw;
};

}  // namespace gdeltkg
