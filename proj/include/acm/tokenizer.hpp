#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "acm/text.hpp"

namespace acm {

/// Identity card of a registered backend (tokenizers, summarizers, ...).
struct BackendSpec {
    std::string name;
    std::string description;
};

using TokenizerSpec = BackendSpec;

/// Token-counting backend. Counts are model-relative; every budget decision
/// in the engine is arithmetic over these counts. Implementations must be
/// deterministic and safely callable from multiple threads.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::string name() const = 0;
    virtual std::string description() const = 0;

    /// Number of tokens in `text`; 0 iff the text has no token.
    virtual int count_tokens(std::string_view text) const = 0;

    /// Token list. Invariant: tokenize(t).size() == count_tokens(t), and
    /// joining with single spaces then re-tokenizing is idempotent.
    virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
};

/// Reference tokenizer: splits on whitespace; each maximal run of
/// letters/digits (non-ASCII bytes count as letters) is one token; an
/// apostrophe immediately followed by such a run forms one token with it
/// ("Smith's" -> Smith, 's); every other punctuation character is its own
/// token. Case is preserved.
class ReferenceTokenizer : public Tokenizer {
public:
    std::string name() const override { return "reference-ws"; }
    std::string description() const override {
        return "whitespace/punctuation splitter with contraction suffixes";
    }

    int count_tokens(std::string_view text) const override {
        int n = 0;
        scan(text, [&](size_t, size_t) { ++n; });
        return n;
    }

    std::vector<std::string> tokenize(std::string_view text) const override {
        std::vector<std::string> out;
        scan(text, [&](size_t b, size_t e) { out.emplace_back(text.substr(b, e - b)); });
        return out;
    }

    template <typename Fn>
    static void scan(std::string_view text, Fn&& emit) {
        const size_t n = text.size();
        size_t i = 0;
        while (i < n) {
            char c = text[i];
            if (text::is_space(c)) {
                ++i;
            } else if (text::is_word_char(c)) {
                size_t j = i + 1;
                while (j < n && text::is_word_char(text[j])) ++j;
                emit(i, j);
                i = j;
            } else if (c == '\'' && i + 1 < n && text::is_word_char(text[i + 1])) {
                size_t j = i + 1;
                while (j < n && text::is_word_char(text[j])) ++j;
                emit(i, j);
                i = j;
            } else {
                emit(i, i + 1);
                ++i;
            }
        }
    }
};

/// First `max_tokens` tokens of `text`, space-joined. Used to enforce hard
/// token caps when a single unit is already too large.
inline std::string truncate_to_tokens(const Tokenizer& tokenizer, std::string_view text,
                                      int max_tokens) {
    std::vector<std::string> tokens = tokenizer.tokenize(text);
    if (static_cast<int>(tokens.size()) > max_tokens) {
        tokens.resize(static_cast<size_t>(max_tokens > 0 ? max_tokens : 0));
    }
    return text::join(tokens, " ");
}

} // namespace acm
