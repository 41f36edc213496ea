#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

#include "acm/errors.hpp"
#include "acm/text.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

/// Question-answering backend consuming an assembled context. Concurrent
/// calls allowed.
class QaBackend {
public:
    virtual ~QaBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string description() const = 0;

    /// Non-empty answer or an explicit no-answer marker.
    virtual std::string answer(const std::string& rendered_context,
                               const std::string& question) const = 0;
};

/// Deterministic extractive stub: returns the context sentence with the
/// highest overlap of lowercased non-stopword tokens with the question
/// (set overlap, ties to the earliest sentence), or the no-answer marker
/// when nothing overlaps. A context that retained the relevant old turn
/// lets the stub find the answering sentence; one that dropped it cannot —
/// which is what makes offline strategy comparisons measurable.
class StubOverlapQa : public QaBackend {
public:
    static constexpr const char* kNoAnswerMarker = "[no-answer]";

    std::string name() const override { return "stub-overlap"; }
    std::string description() const override { return "max token-overlap sentence extractor"; }

    std::string answer(const std::string& rendered_context,
                       const std::string& question) const override {
        if (rendered_context.empty()) {
            throw ValidationError("qa stub: rendered context must be non-empty");
        }
        std::unordered_set<std::string> question_tokens = content_tokens(question);
        std::string question_trimmed = text::trim(question);
        size_t best_overlap = 0;
        std::string best_sentence;
        for (const std::string& sentence : text::split_sentences(rendered_context)) {
            // The rendered context restates the current question; echoing it
            // back is never an answer.
            if (std::string_view(sentence).ends_with(question_trimmed)) continue;
            std::unordered_set<std::string> sentence_tokens = content_tokens(sentence);
            size_t overlap = 0;
            for (const std::string& t : sentence_tokens) overlap += question_tokens.count(t);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best_sentence = sentence;
            }
        }
        return best_overlap > 0 ? best_sentence : kNoAnswerMarker;
    }

private:
    static std::unordered_set<std::string> content_tokens(std::string_view s) {
        ReferenceTokenizer tok;
        std::unordered_set<std::string> out;
        for (const std::string& t : tok.tokenize(s)) {
            std::string low = text::to_lower(t);
            if (!text::stopwords().count(low)) out.insert(std::move(low));
        }
        return out;
    }
};

} // namespace acm
