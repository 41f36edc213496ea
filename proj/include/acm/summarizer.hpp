#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "acm/core.hpp"
#include "acm/errors.hpp"
#include "acm/text.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

/// Input to one summarization pass: the rolling summary so far plus the
/// turns newly demoted out of the unmodified zone.
struct SummaryRequest {
    std::string prior_summary;
    std::vector<Turn> demoted_turns;
    int max_tokens = 0;

    void validate() const {
        if (max_tokens <= 0) throw ValidationError("summary request: max_tokens must be positive");
        if (demoted_turns.empty()) {
            throw ValidationError("summary request: demoted_turns must be non-empty");
        }
    }
};

inline std::string render_turns_for_summary(const std::vector<Turn>& turns) {
    if (turns.empty()) throw ValidationError("render_turns_for_summary: turns must be non-empty");
    std::vector<std::string> lines;
    lines.reserve(turns.size());
    for (const Turn& t : turns) lines.push_back(render_turn_line(t));
    return text::join(lines, "\n");
}

/// Condenses demoted turns into a capped summary. Hard postcondition for
/// every implementation: output token count <= request.max_tokens under the
/// tokenizer the backend was configured with. Concurrent calls allowed.
class Summarizer {
public:
    virtual ~Summarizer() = default;
    virtual std::string name() const = 0;
    virtual std::string description() const = 0;
    virtual std::string summarize(const SummaryRequest& request) const = 0;
};

/// Frequency-based extractive summarizer (deterministic, dependency-free
/// stand-in for a trained summarization model).
///
/// Splits the window (prior summary + rendered demoted turns) into sentences,
/// scores each sentence by the sum of corpus-relative frequencies of its
/// non-stopword tokens (lowercased) divided by its token length, then greedily
/// takes sentences in score order (ties to the earlier sentence) while the
/// running total stays within max_tokens, and re-emits the picks in original
/// order, newline-joined. If even the single best sentence is too large, its
/// first max_tokens tokens are emitted instead.
class ExtractiveSummarizer : public Summarizer {
public:
    explicit ExtractiveSummarizer(std::shared_ptr<Tokenizer> tokenizer)
        : tokenizer_(std::move(tokenizer)) {}

    std::string name() const override { return "reference-extractive"; }
    std::string description() const override {
        return "frequency-scored extractive sentence selection";
    }

    std::string summarize(const SummaryRequest& request) const override {
        request.validate();
        std::string rendered = render_turns_for_summary(request.demoted_turns);
        std::string window = request.prior_summary.empty()
                                 ? std::move(rendered)
                                 : request.prior_summary + "\n" + rendered;

        std::vector<std::string> sentences = text::split_sentences(window);
        if (sentences.empty()) return "";

        std::vector<std::vector<std::string>> tokens(sentences.size());
        std::unordered_map<std::string, int> counts;
        long total_tokens = 0;
        for (size_t i = 0; i < sentences.size(); ++i) {
            tokens[i] = tokenizer_->tokenize(sentences[i]);
            total_tokens += static_cast<long>(tokens[i].size());
            for (const std::string& t : tokens[i]) {
                std::string low = text::to_lower(t);
                if (!text::stopwords().count(low)) ++counts[low];
            }
        }
        if (total_tokens == 0) return "";

        std::vector<double> score(sentences.size(), 0.0);
        for (size_t i = 0; i < sentences.size(); ++i) {
            if (tokens[i].empty()) continue;
            double sum = 0.0;
            for (const std::string& t : tokens[i]) {
                std::string low = text::to_lower(t);
                auto it = counts.find(low);
                if (it != counts.end()) {
                    sum += static_cast<double>(it->second) / static_cast<double>(total_tokens);
                }
            }
            score[i] = sum / static_cast<double>(tokens[i].size());
        }

        std::vector<size_t> order(sentences.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return score[a] > score[b]; });

        std::vector<size_t> picked;
        int running = 0;
        for (size_t idx : order) {
            int len = static_cast<int>(tokens[idx].size());
            if (running + len > request.max_tokens) break;
            picked.push_back(idx);
            running += len;
        }
        if (picked.empty()) {
            return truncate_to_tokens(*tokenizer_, sentences[order.front()], request.max_tokens);
        }
        std::sort(picked.begin(), picked.end());
        std::vector<std::string> out;
        out.reserve(picked.size());
        for (size_t idx : picked) out.push_back(sentences[idx]);
        return text::join(out, "\n");
    }

private:
    std::shared_ptr<Tokenizer> tokenizer_;
};

} // namespace acm
