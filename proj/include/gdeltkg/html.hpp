#pragma once

// Main-text extraction: strip tags, drop boilerplate containers by tag name,
// decode entities, normalize whitespace. Deliberately not a browser — good
// enough to turn news pages into retrieval text.

#include <array>
#include <string>
#include <string_view>

#include "gdeltkg/util.hpp"

namespace gdeltkg {

namespace detail {

// Containers whose entire content is dropped.
inline bool is_boilerplate_tag(std::string_view tag) {
    static constexpr std::array skip = {
        std::string_view("script"), std::string_view("style"), std::string_view("noscript"),
        std::string_view("nav"), std::string_view("header"), std::string_view("footer"),
        std::string_view("aside"), std::string_view("svg"), std::string_view("form"),
        std::string_view("iframe"), std::string_view("template"), std::string_view("head"),
    };
    for (auto t : skip)
        if (t == tag) return true;
    return false;
}

inline bool is_block_tag(std::string_view tag) {
    static constexpr std::array block = {
        std::string_view("p"), std::string_view("div"), std::string_view("br"),
        std::string_view("li"), std::string_view("ul"), std::string_view("ol"),
        std::string_view("h1"), std::string_view("h2"), std::string_view("h3"),
        std::string_view("h4"), std::string_view("h5"), std::string_view("h6"),
        std::string_view("tr"), std::string_view("td"), std::string_view("th"),
        std::string_view("table"), std::string_view("section"), std::string_view("article"),
        std::string_view("blockquote"), std::string_view("figcaption"), std::string_view("pre"),
    };
    for (auto t : block)
        if (t == tag) return true;
    return false;
}

inline void append_codepoint_utf8(std::string& out, uint32_t cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        std::string_view ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (ent == "nbsp") out += ' ';
        else if (ent == "mdash") out += "-";
        else if (ent == "ndash") out += "-";
        else if (ent == "rsquo" || ent == "lsquo") out += '\'';
        else if (ent == "rdquo" || ent == "ldquo") out += '"';
        else if (!ent.empty() && ent[0] == '#') {
            uint32_t cp = 0;
            bool ok = ent.size() > 1;
            if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
                for (size_t k = 2; ok && k < ent.size(); ++k) {
                    char c = ascii_lower(ent[k]);
                    if (c >= '0' && c <= '9') cp = cp * 16 + static_cast<uint32_t>(c - '0');
                    else if (c >= 'a' && c <= 'f') cp = cp * 16 + static_cast<uint32_t>(c - 'a' + 10);
                    else ok = false;
                }
            } else {
                for (size_t k = 1; ok && k < ent.size(); ++k) {
                    if (ent[k] >= '0' && ent[k] <= '9') cp = cp * 10 + static_cast<uint32_t>(ent[k] - '0');
                    else ok = false;
                }
            }
            if (ok) append_codepoint_utf8(out, cp);
            else { out += s[i]; ++i; continue; }
        } else {
            out += s[i++];
            continue;
        }
        i = semi + 1;
    }
    return out;
}

}  // namespace detail

/// Plain text from an HTML payload: boilerplate containers removed, block
/// boundaries become newlines, entities decoded, whitespace collapsed.
inline std::string html_to_text(std::string_view html) {
    std::string text;
    text.reserve(html.size() / 2);
    size_t i = 0;
    const size_t n = html.size();
    while (i < n) {
        if (html[i] != '<') {
            size_t next = html.find('<', i);
            if (next == std::string_view::npos) next = n;
            text.append(html.substr(i, next - i));
            i = next;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            size_t close = html.find("-->", i + 4);
            i = close == std::string_view::npos ? n : close + 3;
            continue;
        }
        size_t close = html.find('>', i + 1);
        if (close == std::string_view::npos) break;  // truncated tag, drop remainder
        std::string_view inner = html.substr(i + 1, close - i - 1);
        bool closing = !inner.empty() && inner.front() == '/';
        if (closing) inner.remove_prefix(1);
        size_t name_end = 0;
        while (name_end < inner.size() &&
               (std::isalnum(static_cast<unsigned char>(inner[name_end])) || inner[name_end] == '-'))
            ++name_end;
        std::string tag = to_lower(inner.substr(0, name_end));
        i = close + 1;
        if (tag.empty()) continue;
        if (!closing && detail::is_boilerplate_tag(tag)) {
            // skip to the matching close tag, ignoring nesting (these do not nest in practice)
            std::string end_tag = "</" + tag;
            size_t pos = i;
            while (pos < n) {
                size_t cand = html.find('<', pos);
                if (cand == std::string_view::npos) { pos = n; break; }
                if (cand + end_tag.size() <= n &&
                    to_lower(html.substr(cand, end_tag.size())) == end_tag) {
                    size_t tagclose = html.find('>', cand);
                    pos = tagclose == std::string_view::npos ? n : tagclose + 1;
                    break;
                }
                pos = cand + 1;
            }
            i = pos;
            continue;
        }
        if (detail::is_block_tag(tag)) text += '\n';
        else text += ' ';
    }
    text = detail::decode_entities(text);

    // Whitespace runs collapse to one space, or one newline if they span a
    // block boundary; leading/trailing whitespace trimmed.
    std::string out;
    out.reserve(text.size());
    bool pending_space = false, pending_newline = false;
    for (char c : text) {
        if (c == '\n') {
            pending_newline = true;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = true;
        } else {
            if (!out.empty()) {
                if (pending_newline) out += '\n';
                else if (pending_space) out += ' ';
            }
            pending_space = pending_newline = false;
            out += c;
        }
    }
    return out;
}

}  // namespace gdeltkg
