#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace acm::text {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Letters, digits, and any non-ASCII byte (UTF-8 continuation/lead bytes)
// count as word characters.
inline bool is_word_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 0x80) return true;
    return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(ascii_lower(c));
    return out;
}

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

/// 50 common English function words, lowercased. Shared by the extractive
/// summarizer (frequency scoring) and the overlap-matching QA stub.
inline const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "the", "a",    "an",   "and",  "or",   "but",  "if",   "then", "so",   "of",
        "in",  "on",   "at",   "to",   "for",  "with", "from", "by",   "as",   "is",
        "are", "was",  "were", "be",   "been", "am",   "do",   "does", "did",  "have",
        "has", "had",  "i",    "you",  "he",   "she",  "it",   "we",   "they", "that",
        "this", "what", "when", "where", "who", "why",  "how",  "not",  "no",   "there",
    };
    return words;
}

inline bool is_stopword(std::string_view token) {
    return stopwords().count(to_lower(token)) > 0;
}

/// Splits text into sentences on runs of '.', '!', '?' (run kept with the
/// preceding sentence) and on newlines. Pieces are trimmed; empties dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    auto flush = [&](size_t b, size_t e) {
        std::string s = trim(text.substr(b, e - b));
        if (!s.empty()) out.push_back(std::move(s));
    };
    size_t start = 0, i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            flush(start, i);
            start = ++i;
        } else if (c == '.' || c == '!' || c == '?') {
            size_t j = i;
            while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
            flush(start, j);
            start = i = j;
        } else {
            ++i;
        }
    }
    flush(start, n);
    return out;
}

} // namespace acm::text
