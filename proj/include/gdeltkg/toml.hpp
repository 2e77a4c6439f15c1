#pragma once

// Minimal TOML subset reader covering the toolkit's config, question and
// ground-truth files: [table], [[array-of-tables]], and key = value lines
// where value is a basic string, integer, float, boolean, or a single-line
// array of strings. Not a general TOML implementation.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>
#include <fstream>
#include <sstream>

#include "gdeltkg/util.hpp"

namespace gdeltkg::toml {

class ParseError : public std::runtime_error {
public:
    ParseError(size_t line, const std::string& msg)
        : std::runtime_error("toml parse error at line " + std::to_string(line) + ": " + msg) {}
};

using Value = std::variant<std::string, int64_t, double, bool, std::vector<std::string>>;

struct Table {
    std::map<std::string, Value> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& fallback = "") const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (auto* s = std::get_if<std::string>(&it->second)) return *s;
        throw std::runtime_error("toml key '" + key + "' is not a string");
    }
    int64_t get_int(const std::string& key, int64_t fallback = 0) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (auto* v = std::get_if<int64_t>(&it->second)) return *v;
        throw std::runtime_error("toml key '" + key + "' is not an integer");
    }
    double get_double(const std::string& key, double fallback = 0) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (auto* v = std::get_if<double>(&it->second)) return *v;
        if (auto* i = std::get_if<int64_t>(&it->second)) return static_cast<double>(*i);
        throw std::runtime_error("toml key '" + key + "' is not a number");
    }
    bool get_bool(const std::string& key, bool fallback = false) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (auto* v = std::get_if<bool>(&it->second)) return *v;
        throw std::runtime_error("toml key '" + key + "' is not a boolean");
    }
    std::vector<std::string> get_str_array(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) return {};
        if (auto* v = std::get_if<std::vector<std::string>>(&it->second)) return *v;
        throw std::runtime_error("toml key '" + key + "' is not a string array");
    }
};

struct Document {
    Table root;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> arrays;

    const Table& table(const std::string& name) const {
        auto it = tables.find(name);
        if (it == tables.end()) throw std::runtime_error("toml table [" + name + "] not found");
        return it->second;
    }
};

namespace detail {

inline std::string parse_basic_string(std::string_view s, size_t line, size_t& pos) {
    // s[pos] == '"' on entry
    std::string out;
    ++pos;
    while (pos < s.size()) {
        char c = s[pos];
        if (c == '"') {
            ++pos;
            return out;
        }
        if (c == '\\') {
            ++pos;
            if (pos >= s.size()) throw ParseError(line, "dangling escape");
            switch (s[pos]) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: throw ParseError(line, std::string("unsupported escape \\") + s[pos]);
            }
            ++pos;
        } else {
            out += c;
            ++pos;
        }
    }
    throw ParseError(line, "unterminated string");
}

inline Value parse_value(std::string_view raw, size_t line) {
    std::string_view v = trim(raw);
    if (v.empty()) throw ParseError(line, "missing value");
    if (v.front() == '"') {
        size_t pos = 0;
        std::string s = parse_basic_string(v, line, pos);
        if (!trim(v.substr(pos)).empty()) throw ParseError(line, "trailing content after string");
        return s;
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ParseError(line, "unterminated array");
        std::vector<std::string> items;
        std::string_view inner = trim(v.substr(1, v.size() - 2));
        size_t pos = 0;
        while (pos < inner.size()) {
            while (pos < inner.size() && (inner[pos] == ' ' || inner[pos] == '\t' || inner[pos] == ',')) ++pos;
            if (pos >= inner.size()) break;
            if (inner[pos] != '"') throw ParseError(line, "only string arrays are supported");
            items.push_back(parse_basic_string(inner, line, pos));
        }
        return items;
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (auto i = parse_int(v)) return *i;
    if (auto d = parse_double(v)) return *d;
    throw ParseError(line, "unrecognized value: " + std::string(v));
}

// Strips a trailing comment that is not inside a string literal.
inline std::string_view strip_comment(std::string_view s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\\' && in_str) { ++i; continue; }
        if (c == '"') in_str = !in_str;
        else if (c == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

}  // namespace detail

inline Document parse(std::string_view text) {
    Document doc;
    Table* current = &doc.root;
    size_t lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        std::string_view rawline = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++lineno;
        std::string_view line = trim(detail::strip_comment(rawline));
        if (line.empty()) continue;
        if (line.front() == '[') {
            bool is_array = line.size() > 1 && line[1] == '[';
            size_t open = is_array ? 2 : 1;
            std::string_view closer = is_array ? "]]" : "]";
            size_t close = line.find(closer, open);
            if (close == std::string_view::npos || !trim(line.substr(close + closer.size())).empty())
                throw ParseError(lineno, "malformed table header");
            std::string name(trim(line.substr(open, close - open)));
            if (name.empty()) throw ParseError(lineno, "empty table name");
            if (is_array) {
                doc.arrays[name].emplace_back();
                current = &doc.arrays[name].back();
            } else {
                current = &doc.tables[name];
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
        std::string key;
        std::string_view keypart = trim(line.substr(0, eq));
        if (!keypart.empty() && keypart.front() == '"') {
            size_t pos = 0;
            key = detail::parse_basic_string(keypart, lineno, pos);
            if (!trim(keypart.substr(pos)).empty()) throw ParseError(lineno, "malformed quoted key");
        } else {
            key = std::string(keypart);
            for (char c : key)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
                    throw ParseError(lineno, "invalid bare key: " + key);
        }
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (current->entries.count(key)) throw ParseError(lineno, "duplicate key: " + key);
        current->entries[key] = detail::parse_value(line.substr(eq + 1), lineno);
    }
    return doc;
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace gdeltkg::toml
