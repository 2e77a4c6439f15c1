#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gdeltkg {

/// Pluggable tokenizer so the 500-token chunk contract stays testable
/// without any particular embedding model. Default is whitespace splitting.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
    virtual std::string join(const std::vector<std::string>& tokens, size_t begin, size_t end) const = 0;
};

class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "whitespace"; }

    std::vector<std::string> tokenize(std::string_view text) const override {
        std::vector<std::string> out;
        size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            if (i > start) out.emplace_back(text.substr(start, i - start));
        }
        return out;
    }

    std::string join(const std::vector<std::string>& tokens, size_t begin, size_t end) const override {
        std::string out;
        for (size_t i = begin; i < end && i < tokens.size(); ++i) {
            if (i > begin) out += ' ';
            out += tokens[i];
        }
        return out;
    }
};

inline const Tokenizer& default_tokenizer() {
    static WhitespaceTokenizer tok;
    return tok;
}

}  // namespace gdeltkg
