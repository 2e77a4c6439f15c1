#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdeltkg {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
    return out;
}

/// Case-insensitive substring test (ASCII folding). Empty needle matches.
inline bool icontains(std::string_view hay, std::string_view needle) {
    if (needle.empty()) return true;
    if (needle.size() > hay.size()) return false;
    auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(),
                          [](char a, char b) { return ascii_lower(a) == ascii_lower(b); });
    return it != hay.end();
}

/// Split preserving empty fields; a trailing delimiter yields a trailing empty field.
inline std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// Trim plus collapse of internal whitespace runs to a single space.
inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // leading whitespace dropped
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out += ' ';
            in_ws = false;
            out += c;
        }
    }
    return out;
}

/// Canonical form used to deduplicate value nodes: collapsed whitespace, case-folded.
inline std::string normalize_label(std::string_view s) {
    return to_lower(collapse_whitespace(s));
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

inline std::optional<int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string to_hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// Stable key used for corpus files: 16 hex chars of FNV-1a over the URL.
inline std::string url_hash(std::string_view url) {
    return to_hex64(fnv1a64(url));
}

/// Replaces invalid UTF-8 sequences with U+FFFD in place; returns replacement count.
inline size_t sanitize_utf8(std::string& s) {
    static const std::string replacement = "\xEF\xBF\xBD";
    std::string out;
    size_t replaced = 0;
    size_t i = 0;
    const size_t n = s.size();
    auto cont = [&](size_t k) {
        return k < n && (static_cast<unsigned char>(s[k]) & 0xC0) == 0x80;
    };
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        size_t len = 0;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
        bool ok = len > 0;
        for (size_t k = 1; ok && k < len; ++k) ok = cont(i + k);
        if (ok && len == 3) {
            unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
            if (c == 0xE0 && c1 < 0xA0) ok = false;            // overlong
            if (c == 0xED && c1 >= 0xA0) ok = false;           // surrogate
        }
        if (ok && len == 4) {
            unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
            if (c == 0xF0 && c1 < 0x90) ok = false;            // overlong
            if (c == 0xF4 && c1 >= 0x90) ok = false;           // > U+10FFFF
        }
        if (ok) {
            out.append(s, i, len);
            i += len;
        } else {
            out += replacement;
            ++replaced;
            ++i;
        }
    }
    if (replaced) s = std::move(out);
    return replaced;
}

/// YYYYMMDD integer to ISO "YYYY-MM-DD"; returns the raw digits when out of shape.
inline std::string yyyymmdd_to_iso(int64_t day) {
    std::string d = std::to_string(day);
    if (d.size() != 8) return d;
    return d.substr(0, 4) + "-" + d.substr(4, 2) + "-" + d.substr(6, 2);
}

/// Leading YYYYMMDD of a YYYYMMDDHHMMSS timestamp, 0 when malformed.
inline int64_t timestamp_date_part(int64_t ts) {
    if (ts >= 10000000000000ll) return ts / 1000000;
    if (ts >= 10000000) return ts;  // already date-shaped
    return 0;
}

}  // namespace gdeltkg
