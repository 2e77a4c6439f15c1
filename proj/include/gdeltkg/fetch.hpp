#pragma once

// Article body retrieval for subset URLs. Live mode does polite HTTP GETs
// (bounded parallelism, one in-flight request per host); fixture mode maps
// URLs to local files and never touches the network. Failures are data.

#include <condition_variable>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gdeltkg/html.hpp"
#include "gdeltkg/util.hpp"

namespace gdeltkg {

enum class FetchStatus { Ok, HttpError, Timeout, ParseFailed, Fixture };

inline const char* fetch_status_name(FetchStatus s) {
    switch (s) {
        case FetchStatus::Ok: return "ok";
        case FetchStatus::HttpError: return "http_error";
        case FetchStatus::Timeout: return "timeout";
        case FetchStatus::ParseFailed: return "parse_failed";
        case FetchStatus::Fixture: return "fixture";
    }
    return "unknown";
}

inline std::optional<FetchStatus> fetch_status_from_name(std::string_view name) {
    if (name == "ok") return FetchStatus::Ok;
    if (name == "http_error") return FetchStatus::HttpError;
    if (name == "timeout") return FetchStatus::Timeout;
    if (name == "parse_failed") return FetchStatus::ParseFailed;
    if (name == "fixture") return FetchStatus::Fixture;
    return std::nullopt;
}

struct ArticleText {
    std::string document_identifier;
    std::string body;
    FetchStatus status = FetchStatus::HttpError;
    int http_code = 0;
    int64_t fetched_at = 0;  // unix seconds; 0 for fixtures

    bool has_text() const { return status == FetchStatus::Ok || status == FetchStatus::Fixture; }
};

struct FetchPolicy {
    int timeout_s = 10;
    size_t max_bytes = 2 * 1024 * 1024;
    int max_redirects = 5;
    int parallel = 4;           // concurrent hosts; within a host requests are serial
    std::string user_agent = "gdeltkg/0.1";
    std::string fixtures_dir;   // when set, URLs resolve against fixtures only
};

namespace detail {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // path?query, at least "/"
};

inline std::optional<UrlParts> split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    std::string scheme = to_lower(url.substr(0, scheme_end));
    if (scheme != "http" && scheme != "https") return std::nullopt;
    size_t host_start = scheme_end + 3;
    size_t path_start = url.find('/', host_start);
    UrlParts parts;
    if (path_start == std::string::npos) {
        parts.origin = url;
        parts.path = "/";
    } else {
        parts.origin = url.substr(0, path_start);
        parts.path = url.substr(path_start);
    }
    if (parts.origin.size() == host_start) return std::nullopt;  // empty host
    return parts;
}

inline std::string resolve_location(const std::string& base_url, const std::string& location) {
    if (location.rfind("http://", 0) == 0 || location.rfind("https://", 0) == 0) return location;
    auto parts = split_url(base_url);
    if (!parts) return location;
    if (!location.empty() && location[0] == '/') return parts->origin + location;
    std::string dir = parts->path.substr(0, parts->path.rfind('/') + 1);
    return parts->origin + dir + location;
}

inline void apply_proxy(httplib::Client& cli, const std::string& scheme) {
    const char* env = scheme == "https" ? std::getenv("https_proxy") : std::getenv("http_proxy");
    if (!env) env = scheme == "https" ? std::getenv("HTTPS_PROXY") : std::getenv("HTTP_PROXY");
    if (!env || !*env) return;
    std::string p(env);
    size_t scheme_end = p.find("://");
    if (scheme_end != std::string::npos) p = p.substr(scheme_end + 3);
    if (!p.empty() && p.back() == '/') p.pop_back();
    size_t colon = p.rfind(':');
    int port = 80;
    std::string host = p;
    if (colon != std::string::npos) {
        if (auto v = parse_int(p.substr(colon + 1))) {
            port = static_cast<int>(*v);
            host = p.substr(0, colon);
        }
    }
    if (!host.empty()) cli.set_proxy(host, port);
}

inline bool looks_like_html(const std::string& content_type, const std::string& body) {
    if (icontains(content_type, "html")) return true;
    if (icontains(content_type, "text/")) return false;
    return body.find('<') != std::string::npos;
}

// Fixture directory: manifest.json maps URL -> relative file; without a
// manifest, <urlhash>.html / <urlhash>.txt are probed.
inline std::optional<std::string> fixture_file_for(const std::string& dir, const std::string& url) {
    namespace fs = std::filesystem;
    fs::path manifest = fs::path(dir) / "manifest.json";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest, std::ios::binary);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
        if (j.contains(url)) return (fs::path(dir) / j[url].get<std::string>()).string();
        return std::nullopt;
    }
    for (const char* ext : {".html", ".txt"}) {
        fs::path cand = fs::path(dir) / (url_hash(url) + ext);
        if (fs::exists(cand)) return cand.string();
    }
    return std::nullopt;
}

inline ArticleText fetch_fixture(const std::string& url, const FetchPolicy& policy) {
    ArticleText at;
    at.document_identifier = url;
    auto file = fixture_file_for(policy.fixtures_dir, url);
    if (!file) {
        at.status = FetchStatus::HttpError;
        return at;
    }
    std::ifstream in(*file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string payload = ss.str();
    at.body = file->ends_with(".html") ? html_to_text(payload) : payload;
    at.status = FetchStatus::Fixture;
    return at;
}

}  // namespace detail

inline ArticleText fetch_article(const std::string& url, const FetchPolicy& policy) {
    ArticleText at;
    at.document_identifier = url;
    if (!policy.fixtures_dir.empty()) return detail::fetch_fixture(url, policy);

    std::string current = url;
    for (int hop = 0; hop <= policy.max_redirects; ++hop) {
        auto parts = detail::split_url(current);
        if (!parts) {
            at.status = FetchStatus::HttpError;
            return at;
        }
        httplib::Client cli(parts->origin);
        cli.set_connection_timeout(policy.timeout_s, 0);
        cli.set_read_timeout(policy.timeout_s, 0);
        cli.set_follow_location(false);
        detail::apply_proxy(cli, parts->origin.rfind("https", 0) == 0 ? "https" : "http");

        std::string body;
        int status = 0;
        std::string content_type, location;
        bool capped = false;
        auto res = cli.Get(
            parts->path, {{"User-Agent", policy.user_agent}, {"Accept", "text/html,text/plain,*/*"}},
            [&](const httplib::Response& resp) {
                status = resp.status;
                content_type = resp.get_header_value("Content-Type");
                location = resp.get_header_value("Location");
                return true;
            },
            [&](const char* data, size_t len) {
                size_t room = policy.max_bytes > body.size() ? policy.max_bytes - body.size() : 0;
                if (len >= room) {
                    body.append(data, room);
                    capped = true;
                    return false;  // stop transfer at the cap
                }
                body.append(data, len);
                return true;
            });

        if (!res && !(capped && status > 0)) {
            auto err = res.error();
            at.status = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                         err == httplib::Error::Write)
                            ? FetchStatus::Timeout
                            : FetchStatus::HttpError;
            at.http_code = 0;
            return at;
        }

        if (status >= 300 && status < 400 && !location.empty()) {
            current = detail::resolve_location(current, location);
            continue;
        }
        at.http_code = status;
        at.fetched_at = static_cast<int64_t>(std::time(nullptr));
        if (status < 200 || status >= 300) {
            at.status = FetchStatus::HttpError;
            return at;
        }
        at.body = detail::looks_like_html(content_type, body) ? html_to_text(body)
                                                              : collapse_whitespace(body);
        if (at.body.empty()) {
            at.status = FetchStatus::ParseFailed;
            return at;
        }
        at.status = FetchStatus::Ok;
        return at;
    }
    at.status = FetchStatus::HttpError;  // redirect limit exhausted
    return at;
}

struct FetchSummary {
    size_t ok = 0, fixture = 0, failed = 0, skipped = 0;
    size_t total() const { return ok + fixture + failed + skipped; }
};

inline constexpr const char* kCorpusFormat = "gdeltkg-corpus";
inline constexpr int kCorpusFormatVersion = 1;

/// Fetches every distinct URL into `out_dir` as <urlhash>.txt plus a
/// manifest. URLs already present with a good status are skipped.
inline FetchSummary fetch_corpus(const std::vector<std::string>& urls, const std::string& out_dir,
                                 const FetchPolicy& policy) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    nlohmann::json entries = nlohmann::json::object();
    fs::path manifest_path = fs::path(out_dir) / "manifest.json";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path, std::ios::binary);
        nlohmann::json old;
        try {
            in >> old;
            if (old.value("format", "") == kCorpusFormat) entries = old.value("entries", nlohmann::json::object());
        } catch (const nlohmann::json::exception&) {
            // unreadable manifest: refetch everything
        }
    }

    FetchSummary summary;
    std::vector<std::string> todo;
    std::set<std::string> seen;
    for (const auto& url : urls) {
        if (!seen.insert(url).second) continue;  // duplicate input URL, single fetch
        if (entries.contains(url)) {
            auto st = fetch_status_from_name(entries[url].value("status", ""));
            if (st && (*st == FetchStatus::Ok || *st == FetchStatus::Fixture) &&
                fs::exists(fs::path(out_dir) / (entries[url].value("hash", "") + ".txt"))) {
                ++summary.skipped;
                continue;
            }
        }
        todo.push_back(url);
    }

    // Group by host so each host sees at most one in-flight request.
    std::map<std::string, std::vector<std::string>> by_host;
    for (const auto& url : todo) {
        auto parts = detail::split_url(url);
        by_host[parts ? parts->origin : std::string("-")].push_back(url);
    }
    std::vector<std::vector<std::string>> host_queues;
    host_queues.reserve(by_host.size());
    for (auto& [host, list] : by_host) host_queues.push_back(std::move(list));

    std::mutex mu;
    size_t next_queue = 0;
    std::vector<ArticleText> fetched;
    auto worker = [&] {
        while (true) {
            size_t idx;
            {
                std::lock_guard lock(mu);
                if (next_queue >= host_queues.size()) return;
                idx = next_queue++;
            }
            for (const auto& url : host_queues[idx]) {
                ArticleText at = fetch_article(url, policy);
                std::lock_guard lock(mu);
                fetched.push_back(std::move(at));
            }
        }
    };
    size_t nthreads = std::min<size_t>(std::max(1, policy.parallel), host_queues.size());
    std::vector<std::thread> pool;
    for (size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::sort(fetched.begin(), fetched.end(),
              [](const ArticleText& a, const ArticleText& b) { return a.document_identifier < b.document_identifier; });
    for (const auto& at : fetched) {
        std::string hash = url_hash(at.document_identifier);
        if (at.has_text()) {
            std::ofstream out(fs::path(out_dir) / (hash + ".txt"), std::ios::binary);
            out << at.body;
            at.status == FetchStatus::Ok ? ++summary.ok : ++summary.fixture;
        } else {
            ++summary.failed;
        }
        entries[at.document_identifier] = {
            {"hash", hash},
            {"status", fetch_status_name(at.status)},
            {"http_code", at.http_code},
            {"fetched_at", at.fetched_at},
        };
    }

    nlohmann::json manifest{{"format", kCorpusFormat}, {"format_version", kCorpusFormatVersion}, {"entries", entries}};
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + manifest_path.string());
    out << manifest.dump(2) << "\n";
    return summary;
}

inline std::vector<ArticleText> load_corpus(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus manifest in " + dir);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt corpus manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != kCorpusFormat)
        throw std::runtime_error(dir + " is not a corpus directory");
    std::vector<ArticleText> out;
    for (const auto& [url, entry] : manifest.value("entries", nlohmann::json::object()).items()) {
        ArticleText at;
        at.document_identifier = url;
        at.status = fetch_status_from_name(entry.value("status", "")).value_or(FetchStatus::HttpError);
        at.http_code = entry.value("http_code", 0);
        at.fetched_at = entry.value("fetched_at", int64_t{0});
        if (at.has_text()) {
            std::ifstream body(fs::path(dir) / (entry.value("hash", "") + ".txt"), std::ios::binary);
            std::ostringstream ss;
            ss << body.rdbuf();
            at.body = ss.str();
        }
        out.push_back(std::move(at));
    }
    return out;
}

}  // namespace gdeltkg
