#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "acm/core.hpp"
#include "acm/text.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

/// Named-entity backend: identification phase of the extraction pipeline.
/// Items come back ordered by first occurrence, deduplicated within the call.
class EntityExtractor {
public:
    virtual ~EntityExtractor() = default;
    virtual std::string name() const = 0;
    virtual std::string description() const = 0;
    virtual std::vector<EntityItem> identify(std::string_view text, int source_turn) const = 0;
};

/// Rule-based reference extractor. Rules, applied left to right over the
/// token stream:
///   - month-name patterns (month + day and/or year, optional comma) and
///     digit groups shaped like dates (d/d/d, d-d-d)      -> date
///   - maximal runs of capitalized words                  -> other
///     (single-word runs that are stopwords are skipped: "It" no, "Alice" yes)
///   - maximal runs of bare numbers                       -> other
/// Finer categories (person/organization/location) are left to pluggable
/// backends.
class RuleBasedExtractor : public EntityExtractor {
public:
    std::string name() const override { return "reference-rules"; }
    std::string description() const override {
        return "capitalization/date/number heuristics";
    }

    std::vector<EntityItem> identify(std::string_view input, int source_turn) const override {
        struct Tok {
            size_t begin, end;
            bool word;
        };
        std::vector<Tok> toks;
        ReferenceTokenizer::scan(input, [&](size_t b, size_t e) {
            toks.push_back({b, e, text::is_word_char(input[b])});
        });

        auto piece = [&](size_t i) { return input.substr(toks[i].begin, toks[i].end - toks[i].begin); };
        auto is_number = [&](size_t i) {
            if (!toks[i].word) return false;
            std::string_view s = piece(i);
            return std::all_of(s.begin(), s.end(), text::is_ascii_digit);
        };
        auto is_year = [&](size_t i) { return is_number(i) && toks[i].end - toks[i].begin == 4; };
        auto is_day = [&](size_t i) {
            return is_number(i) && toks[i].end - toks[i].begin <= 2;
        };
        auto is_capitalized = [&](size_t i) {
            return toks[i].word && text::is_ascii_upper(input[toks[i].begin]);
        };
        auto is_month = [&](size_t i) {
            static const std::unordered_set<std::string> months = {
                "january", "february", "march",     "april",   "may",      "june",
                "july",    "august",   "september", "october", "november", "december"};
            return toks[i].word && months.count(text::to_lower(piece(i))) > 0;
        };
        auto is_punct = [&](size_t i, char c) {
            return !toks[i].word && toks[i].end - toks[i].begin == 1 && input[toks[i].begin] == c;
        };

        std::vector<EntityItem> items;
        std::unordered_set<std::string> seen;
        auto emit = [&](size_t begin_tok, size_t end_tok, EntityCategory cat) {
            std::string surface(
                input.substr(toks[begin_tok].begin, toks[end_tok].end - toks[begin_tok].begin));
            std::string key = text::to_lower(surface) + "\x1f" + to_string(cat);
            if (seen.insert(key).second) {
                items.push_back(EntityItem{std::move(surface), cat, source_turn});
            }
        };

        const size_t n = toks.size();
        size_t i = 0;
        while (i < n) {
            // Month date: month [day] [,] [year] — needs at least one number.
            if (is_month(i)) {
                size_t j = i + 1;
                bool has_number = false;
                if (j < n && is_day(j) && !is_year(j)) {
                    has_number = true;
                    ++j;
                }
                if (j < n && is_punct(j, ',') && j + 1 < n && is_year(j + 1)) ++j;
                if (j < n && is_year(j)) {
                    has_number = true;
                    ++j;
                }
                if (has_number) {
                    emit(i, j - 1, EntityCategory::date);
                    i = j;
                    continue;
                }
            }
            // Numeric date shapes: d/d/d or d-d-d.
            if (is_number(i) && i + 4 < n &&
                ((is_punct(i + 1, '/') && is_number(i + 2) && is_punct(i + 3, '/') &&
                  is_number(i + 4)) ||
                 (is_punct(i + 1, '-') && is_number(i + 2) && is_punct(i + 3, '-') &&
                  is_number(i + 4)))) {
                emit(i, i + 4, EntityCategory::date);
                i += 5;
                continue;
            }
            // Bare number run.
            if (is_number(i)) {
                size_t j = i + 1;
                while (j < n && is_number(j)) ++j;
                emit(i, j - 1, EntityCategory::other);
                i = j;
                continue;
            }
            // Capitalized word run.
            if (is_capitalized(i)) {
                size_t j = i + 1;
                while (j < n && is_capitalized(j)) ++j;
                bool single_stopword = (j == i + 1) && text::is_stopword(piece(i));
                if (!single_stopword) emit(i, j - 1, EntityCategory::other);
                i = j;
                continue;
            }
            ++i;
        }
        return items;
    }
};

/// Appends `incoming` to `existing`, dropping case-insensitive duplicates of
/// (surface, category). Order preserved.
inline std::vector<EntityItem> merge_entity_items(std::vector<EntityItem> existing,
                                                  const std::vector<EntityItem>& incoming) {
    std::unordered_set<std::string> seen;
    for (const EntityItem& item : existing) {
        seen.insert(text::to_lower(item.surface) + "\x1f" + to_string(item.category));
    }
    for (const EntityItem& item : incoming) {
        std::string key = text::to_lower(item.surface) + "\x1f" + to_string(item.category);
        if (seen.insert(key).second) existing.push_back(item);
    }
    return existing;
}

/// Integration phase: merges freshly extracted items into the zone state and
/// advances the entity boundary past the demoted turns.
inline ZoneState integrate_entities(ZoneState zone, const std::vector<EntityItem>& new_items) {
    int max_source = 0;
    for (const EntityItem& item : new_items) max_source = std::max(max_source, item.source_turn);
    zone.entity_items = merge_entity_items(std::move(zone.entity_items), new_items);
    zone.entity_boundary = std::max(zone.entity_boundary, max_source + 1);
    return zone;
}

/// "Key facts: e1; e2; ..." or empty string when there are no items.
inline std::string render_entity_segment(const std::vector<EntityItem>& items,
                                         std::string_view label = "Key facts:") {
    if (items.empty()) return "";
    std::vector<std::string> surfaces;
    surfaces.reserve(items.size());
    for (const EntityItem& item : items) surfaces.push_back(item.surface);
    std::string joined = text::join(surfaces, "; ");
    if (label.empty()) return joined;
    return std::string(label) + " " + joined;
}

} // namespace acm
