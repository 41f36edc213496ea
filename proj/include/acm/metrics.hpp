#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acm/errors.hpp"
#include "acm/text.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

/// Per-question evaluation: prediction vs. gold with all four scores in [0,1].
struct EvalRecord {
    std::string conversation_id;
    int turn_index = 0;
    std::string prediction;
    std::string gold;
    double f1 = 0.0;
    double rouge1 = 0.0;
    double rougeL = 0.0;
    double bleu = 0.0;
};

/// Aggregate of one run: macro averages (x100) over per-question records.
struct RunReport {
    std::string strategy;
    std::vector<EvalRecord> records;
    double f1 = 0.0;
    double rouge1 = 0.0;
    double rougeL = 0.0;
    double bleu = 0.0;
    std::string averaging = "macro-per-question";
};

namespace metrics_detail {

inline std::vector<std::string> metric_tokens(std::string_view s) {
    ReferenceTokenizer tok;
    std::vector<std::string> out = tok.tokenize(s);
    for (std::string& t : out) t = text::to_lower(t);
    return out;
}

inline double f_measure(double precision, double recall) {
    if (precision <= 0.0 || recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

// Multiset intersection size.
inline long overlap_count(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::unordered_map<std::string, long> counts;
    for (const std::string& t : a) ++counts[t];
    long overlap = 0;
    for (const std::string& t : b) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return overlap;
}

inline double unigram_f(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.empty() || gold.empty()) return 0.0;
    long overlap = overlap_count(pred, gold);
    if (overlap == 0) return 0.0;
    double precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
    double recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
    return f_measure(precision, recall);
}

inline long lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) return 0;
    std::vector<long> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

} // namespace metrics_detail

/// Token-level F1: multiset unigram overlap between lowercased reference
/// tokens; P = overlap/|pred|, R = overlap/|gold|, F1 = 2PR/(P+R).
inline double f1_token(std::string_view prediction, std::string_view gold) {
    return metrics_detail::unigram_f(metrics_detail::metric_tokens(prediction),
                                     metrics_detail::metric_tokens(gold));
}

/// ROUGE-1 F-measure (beta = 1) over unigram multiset overlap.
inline double rouge_1(std::string_view prediction, std::string_view gold) {
    return metrics_detail::unigram_f(metrics_detail::metric_tokens(prediction),
                                     metrics_detail::metric_tokens(gold));
}

/// ROUGE-L F-measure: longest common subsequence over token sequences,
/// classic quadratic dynamic program.
inline double rouge_l(std::string_view prediction, std::string_view gold) {
    std::vector<std::string> p = metrics_detail::metric_tokens(prediction);
    std::vector<std::string> g = metrics_detail::metric_tokens(gold);
    if (p.empty() || g.empty()) return 0.0;
    long lcs = metrics_detail::lcs_length(p, g);
    if (lcs == 0) return 0.0;
    double precision = static_cast<double>(lcs) / static_cast<double>(p.size());
    double recall = static_cast<double>(lcs) / static_cast<double>(g.size());
    return metrics_detail::f_measure(precision, recall);
}

/// BLEU with n-gram orders 1-4, uniform weights, clipped modified precision,
/// brevity penalty exp(1 - |gold|/|pred|) when the prediction is shorter.
/// Orders whose raw match count is zero get add-one smoothing on numerator
/// and denominator (short reference answers make unsmoothed BLEU-4
/// degenerate).
inline double bleu(std::string_view prediction, std::string_view gold) {
    std::vector<std::string> p = metrics_detail::metric_tokens(prediction);
    std::vector<std::string> g = metrics_detail::metric_tokens(gold);
    if (p.empty() || g.empty()) return 0.0;

    auto ngram_counts = [](const std::vector<std::string>& toks, size_t order) {
        std::unordered_map<std::string, long> counts;
        if (toks.size() < order) return counts;
        for (size_t i = 0; i + order <= toks.size(); ++i) {
            std::string key;
            for (size_t j = 0; j < order; ++j) {
                if (j) key.push_back('\x1f');
                key += toks[i + j];
            }
            ++counts[key];
        }
        return counts;
    };

    double log_sum = 0.0;
    for (size_t order = 1; order <= 4; ++order) {
        auto pc = ngram_counts(p, order);
        auto gc = ngram_counts(g, order);
        long total = p.size() >= order ? static_cast<long>(p.size() - order + 1) : 0;
        long matched = 0;
        for (const auto& [key, count] : pc) {
            auto it = gc.find(key);
            if (it != gc.end()) matched += std::min(count, it->second);
        }
        double precision;
        if (matched > 0) {
            precision = static_cast<double>(matched) / static_cast<double>(total);
        } else {
            precision = 1.0 / static_cast<double>(total + 1);
        }
        log_sum += 0.25 * std::log(precision);
    }
    double brevity = 1.0;
    if (p.size() < g.size()) {
        brevity = std::exp(1.0 - static_cast<double>(g.size()) / static_cast<double>(p.size()));
    }
    return brevity * std::exp(log_sum);
}

inline EvalRecord score_record(std::string conversation_id, int turn_index, std::string prediction,
                               std::string gold) {
    EvalRecord r;
    r.conversation_id = std::move(conversation_id);
    r.turn_index = turn_index;
    r.f1 = f1_token(prediction, gold);
    r.rouge1 = rouge_1(prediction, gold);
    r.rougeL = rouge_l(prediction, gold);
    r.bleu = bleu(prediction, gold);
    r.prediction = std::move(prediction);
    r.gold = std::move(gold);
    return r;
}

/// Macro averages x100 (full precision; rounding to 2 decimals happens only
/// in rendered reports).
inline RunReport aggregate(std::vector<EvalRecord> records, std::string strategy) {
    if (records.empty()) throw ValidationError("aggregate: no records to aggregate");
    RunReport report;
    report.strategy = std::move(strategy);
    double f1 = 0.0, r1 = 0.0, rl = 0.0, bl = 0.0;
    for (const EvalRecord& r : records) {
        f1 += r.f1;
        r1 += r.rouge1;
        rl += r.rougeL;
        bl += r.bleu;
    }
    const double n = static_cast<double>(records.size());
    report.f1 = 100.0 * f1 / n;
    report.rouge1 = 100.0 * r1 / n;
    report.rougeL = 100.0 * rl / n;
    report.bleu = 100.0 * bl / n;
    report.records = std::move(records);
    return report;
}

} // namespace acm
