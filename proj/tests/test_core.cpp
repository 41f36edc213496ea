#include <doctest.h>

#include <random>

#include "acm/core.hpp"

using namespace acm;

TEST_CASE("new_conversation starts empty and validates the passage") {
    Conversation c = new_conversation("c1", "Alice went to Paris.");
    CHECK(c.turns.empty());
    CHECK(c.base_passage == "Alice went to Paris.");
    CHECK_THROWS_AS(new_conversation("c1", ""), ValidationError);
    CHECK_THROWS_AS(new_conversation("c1", "   "), ValidationError);
}

TEST_CASE("record_turn appends contiguous indices") {
    Conversation c = new_conversation("c1", "base");
    c = record_turn(std::move(c), "first question", "a1");
    CHECK(c.turns.size() == 1);
    CHECK(c.turns[0].index == 1);
    c = record_turn(std::move(c), "second question", "a2");
    CHECK(c.turns[1].index == 2);
    CHECK_THROWS_AS(record_turn(std::move(c), " ", "a"), ValidationError);
}

TEST_CASE("recording turns never touches zone state") {
    Conversation c = new_conversation("c1", "base");
    ZoneState zone = ZoneState::initial("c1");
    for (int i = 0; i < 50; ++i) {
        c = record_turn(std::move(c), "q" + std::to_string(i), "a" + std::to_string(i));
    }
    CHECK(zone.entity_boundary == 1);
    CHECK(zone.summary_boundary == 1);
    CHECK(zone.entity_items.empty());
    CHECK(zone.summary_text.empty());
    validate_zone(zone, c);
}

TEST_CASE("zone boundaries partition the turn range") {
    // [1,m) ∪ [m,p) ∪ [p,n] must cover 1..n exactly, for any legal m <= p.
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int n = std::uniform_int_distribution<int>(0, 40)(rng);
        int m = std::uniform_int_distribution<int>(1, n + 1)(rng);
        int p = std::uniform_int_distribution<int>(m, n + 1)(rng);
        std::vector<int> zone_of(static_cast<size_t>(n) + 1, 0);
        for (int i = 1; i < m; ++i) zone_of[static_cast<size_t>(i)] += 1;
        for (int i = m; i < p; ++i) zone_of[static_cast<size_t>(i)] += 1;
        for (int i = p; i <= n; ++i) zone_of[static_cast<size_t>(i)] += 1;
        for (int i = 1; i <= n; ++i) CHECK(zone_of[static_cast<size_t>(i)] == 1);
    }
}

TEST_CASE("validate_zone rejects inconsistent state") {
    Conversation c = new_conversation("c1", "base");
    c = record_turn(std::move(c), "q", "a");
    ZoneState zone = ZoneState::initial("c1");
    zone.summary_boundary = 5; // n+1 == 2
    CHECK_THROWS_AS(validate_zone(zone, c), ValidationError);
    ZoneState other = ZoneState::initial("c2");
    CHECK_THROWS_AS(validate_zone(other, c), ValidationError);
}

TEST_CASE("turn line rendering") {
    Turn t{1, "who is there", "nobody"};
    CHECK(render_turn_line(t) == "Q: who is there A: nobody");
}

TEST_CASE("token budget validation and floor arithmetic") {
    TokenBudget budget;
    budget.ms_max = 90;
    budget.sm_limit = 30;
    budget.unc_floor_fraction = 0.9;
    budget.validate();
    CHECK(budget.unc_floor_tokens() == 81); // exact despite binary 0.9
    budget.unc_floor_fraction = 0.75;
    budget.ms_max = 80;
    CHECK(budget.unc_floor_tokens() == 60);
    budget.sm_limit = 80;
    CHECK_THROWS_AS(budget.validate(), ValidationError);
    budget.sm_limit = 30;
    budget.unc_floor_fraction = 1.0;
    CHECK_THROWS_AS(budget.validate(), ValidationError);
}
