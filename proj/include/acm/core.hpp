#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acm/errors.hpp"
#include "acm/text.hpp"

namespace acm {

/// One question/answer exchange. The atomic unit of history: a turn ages
/// through the zones whole, never split.
struct Turn {
    int index = 0; // 1-based position in the conversation
    std::string question;
    std::string answer;
};

/// A conversation: the base passage all questions are asked against plus
/// the ordered turns recorded so far. Value type; updates return new values.
struct Conversation {
    std::string id;
    std::string base_passage;
    std::vector<Turn> turns;
};

/// Token budget for context assembly.
///   ms_max             model maximum input size
///   sm_limit           cap on the summary segment
///   unc_floor_fraction minimum share of ms_max the unmodified segment must
///                      keep once entity demotion has begun
struct TokenBudget {
    int ms_max = 1024;
    int sm_limit = 120;
    double unc_floor_fraction = 0.75;

    void validate() const {
        if (sm_limit <= 0 || ms_max <= 0 || sm_limit >= ms_max) {
            throw ValidationError("token budget requires 0 < sm_limit < ms_max (got sm_limit=" +
                                  std::to_string(sm_limit) + ", ms_max=" + std::to_string(ms_max) +
                                  ")");
        }
        if (!(unc_floor_fraction > 0.0) || !(unc_floor_fraction < 1.0)) {
            throw ValidationError("unc_floor_fraction must lie in (0,1)");
        }
    }

    // Integralized floor so engine, oracle, and tests compare identically
    // (0.9*90 must read as 81, not 81.0000000000000019).
    int unc_floor_tokens() const {
        return static_cast<int>(std::ceil(unc_floor_fraction * ms_max - 1e-9));
    }
};

enum class EntityCategory { person, organization, date, location, other };

inline std::string to_string(EntityCategory c) {
    switch (c) {
        case EntityCategory::person: return "person";
        case EntityCategory::organization: return "organization";
        case EntityCategory::date: return "date";
        case EntityCategory::location: return "location";
        case EntityCategory::other: return "other";
    }
    return "other";
}

inline EntityCategory entity_category_from_string(std::string_view s) {
    if (s == "person") return EntityCategory::person;
    if (s == "organization" || s == "org") return EntityCategory::organization;
    if (s == "date") return EntityCategory::date;
    if (s == "location" || s == "place") return EntityCategory::location;
    return EntityCategory::other;
}

/// One extracted key fact retained after its source turn left the summary
/// window.
struct EntityItem {
    std::string surface;
    EntityCategory category = EntityCategory::other;
    int source_turn = 0;
};

/// Partition of a conversation's recorded turns into the three aging zones,
/// by turn index:
///   [1, m)  entity zone      (entity_boundary m)
///   [m, p)  summary zone     (summary_boundary p)
///   [p, n]  unmodified zone
/// m = p = 1 means everything is still unmodified. Boundaries only ever move
/// forward; rebalancing happens at assembly time, not on record.
struct ZoneState {
    int entity_boundary = 1;  // m
    int summary_boundary = 1; // p
    std::vector<EntityItem> entity_items;
    std::string summary_text;
    std::string conversation_ref;

    static ZoneState initial(std::string conversation_id) {
        ZoneState z;
        z.conversation_ref = std::move(conversation_id);
        return z;
    }
};

inline void validate_zone(const ZoneState& zone, const Conversation& conversation) {
    const int n = static_cast<int>(conversation.turns.size());
    if (!zone.conversation_ref.empty() && zone.conversation_ref != conversation.id) {
        throw ValidationError("zone state belongs to conversation '" + zone.conversation_ref +
                              "', not '" + conversation.id + "'");
    }
    if (zone.entity_boundary < 1 || zone.entity_boundary > zone.summary_boundary ||
        zone.summary_boundary > n + 1) {
        throw ValidationError("zone boundaries out of range: m=" +
                              std::to_string(zone.entity_boundary) +
                              ", p=" + std::to_string(zone.summary_boundary) +
                              ", n=" + std::to_string(n));
    }
}

inline Conversation new_conversation(std::string id, std::string base_passage) {
    if (text::trim(base_passage).empty()) {
        throw ValidationError("conversation '" + id + "': base passage must be non-empty");
    }
    Conversation c;
    c.id = std::move(id);
    c.base_passage = std::move(base_passage);
    return c;
}

inline Conversation record_turn(Conversation conversation, std::string question,
                                std::string answer) {
    if (text::trim(question).empty()) {
        throw ValidationError("conversation '" + conversation.id + "': question must be non-empty");
    }
    Turn t;
    t.index = static_cast<int>(conversation.turns.size()) + 1;
    t.question = std::move(question);
    t.answer = std::move(answer);
    conversation.turns.push_back(std::move(t));
    return conversation;
}

/// Canonical one-line rendering of a turn, used both for the unmodified
/// segment and as summarizer input.
inline std::string render_turn_line(const Turn& turn) {
    return "Q: " + turn.question + " A: " + turn.answer;
}

/// Per-segment token counts of one assembled context. `total` is the count
/// of the fully rendered text including labels and separators; the segment
/// fields count the bare segment contents.
struct SegmentTokenCounts {
    int base = 0;
    int entities = 0;
    int summary = 0;
    int unmodified = 0;
    int question = 0;
    int total = 0;
};

} // namespace acm
