#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acm/core.hpp"
#include "acm/entity_extractor.hpp"
#include "acm/errors.hpp"
#include "acm/qa.hpp"
#include "acm/summarizer.hpp"
#include "acm/text.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

/// Segment labels of the rendered context. An empty label renders the
/// segment content bare. Labels count toward the token budget — the model
/// sees them.
struct RenderLabels {
    std::string passage = "Passage:";
    std::string entities = "Key facts:";
    std::string summary = "Summary:";
    std::string conversation = "Conversation:";
    std::string question = "Question:";
};

enum class Strategy { acm, pipeline_immediate, full_history, k_turn };

/// Context strategy: the adaptive engine or one of the baselines it is
/// compared against (most recent turn only / all turns / last k turns).
struct StrategyKind {
    Strategy kind = Strategy::acm;
    int k = 1; // k_turn only

    static StrategyKind acm() { return {Strategy::acm, 1}; }
    static StrategyKind pipeline_immediate() { return {Strategy::pipeline_immediate, 1}; }
    static StrategyKind full_history() { return {Strategy::full_history, 1}; }
    static StrategyKind k_turn(int k) {
        if (k < 1) throw ValidationError("k_turn strategy requires k >= 1");
        return {Strategy::k_turn, k};
    }

    std::string to_string() const {
        switch (kind) {
            case Strategy::acm: return "acm";
            case Strategy::pipeline_immediate: return "pipeline_immediate";
            case Strategy::full_history: return "full_history";
            case Strategy::k_turn: return "k_turn:" + std::to_string(k);
        }
        return "acm";
    }

    static StrategyKind parse(std::string_view s) {
        if (s == "acm") return acm();
        if (s == "pipeline_immediate") return pipeline_immediate();
        if (s == "full_history") return full_history();
        if (s.rfind("k_turn:", 0) == 0) {
            int k = 0;
            try {
                k = std::stoi(std::string(s.substr(7)));
            } catch (const std::exception&) {
                throw ValidationError("invalid k_turn strategy '" + std::string(s) + "'");
            }
            return k_turn(k);
        }
        throw ValidationError("unknown strategy '" + std::string(s) + "'");
    }

    bool operator==(const StrategyKind& other) const {
        return kind == other.kind && (kind != Strategy::k_turn || k == other.k);
    }
};

struct EngineConfig {
    TokenBudget budget;
    std::string tokenizer = "reference-ws";
    std::string summarizer = "reference-extractive";
    std::string entity_extractor = "reference-rules";
    std::string qa = "stub-overlap";
    RenderLabels labels;
    std::optional<int> eec_max_tokens; // unset = unlimited
};

/// Resolved backend set an engine runs with.
struct Backends {
    std::shared_ptr<Tokenizer> tokenizer;
    std::shared_ptr<Summarizer> summarizer;
    std::shared_ptr<EntityExtractor> extractor;
    std::shared_ptr<QaBackend> qa;
};

/// Rendered model input for one question. Segment fields hold the bare
/// content (the entity segment carries its own label per its render
/// contract); `rendered` is the labeled, blank-line-joined full text and
/// `total_tokens` is the tokenizer's count of it.
struct AssembledContext {
    std::string base_passage;
    std::string entity_segment;
    std::string summary_segment;
    std::string unmodified_segment;
    std::string current_question;
    std::string rendered;
    int total_tokens = 0;
    SegmentTokenCounts counts;
    bool truncated = false; // baselines: whole oldest turns were dropped to fit
};

struct AssembleResult {
    AssembledContext context;
    ZoneState zone;
};

namespace engine_detail {

inline std::string label_join(const std::string& label, const std::string& content) {
    if (content.empty()) return "";
    if (label.empty()) return content;
    return label + " " + content;
}

inline std::string render_context(const RenderLabels& labels, const std::string& base,
                                  const std::string& entity_segment, const std::string& summary,
                                  const std::string& unmodified, const std::string& question) {
    // Multi-line segments (summary, conversation) take their label on its
    // own line; single-line ones inline it.
    std::vector<std::string> parts;
    parts.push_back(label_join(labels.passage, base));
    if (!entity_segment.empty()) parts.push_back(entity_segment);
    if (!summary.empty()) {
        parts.push_back(labels.summary.empty() ? summary : labels.summary + "\n" + summary);
    }
    if (!unmodified.empty()) {
        parts.push_back(labels.conversation.empty() ? unmodified
                                                    : labels.conversation + "\n" + unmodified);
    }
    parts.push_back(label_join(labels.question, question));
    std::vector<std::string> nonempty;
    for (std::string& p : parts) {
        if (!p.empty()) nonempty.push_back(std::move(p));
    }
    return text::join(nonempty, "\n\n");
}

inline std::string join_lines(const std::vector<std::string>& lines, int from_turn, int to_turn) {
    // Inclusive 1-based turn range.
    std::string out;
    for (int i = from_turn; i <= to_turn; ++i) {
        if (i > from_turn) out.push_back('\n');
        out += lines[static_cast<size_t>(i - 1)];
    }
    return out;
}

} // namespace engine_detail

/// Assembles the model input for `question` against the conversation's
/// recorded history, rebalancing the three zones under the token budget:
///
///   1. Tentatively keep every not-yet-demoted turn unmodified.
///   2. While the context exceeds ms_max, demote the oldest unmodified turn
///      into the summary window and re-summarize under sm_limit. The newest
///      turn is never demoted, and once the entity zone is non-empty the
///      unmodified segment is never pushed below the UNC floor.
///   3. If the summary window saturated during step 2 (its input exceeded
///      sm_limit before capping), shift zones while the unmodified segment
///      stays above the floor: oldest summary turn -> entity zone (entities
///      read the turn's original text), oldest unmodified turn -> summary
///      window, re-summarize. Break when the next shift would drop the
///      unmodified segment below the floor.
///   4. If the context still exceeds ms_max, fail with budget overflow.
inline AssembleResult assemble(const Conversation& conversation, const ZoneState& zone_state,
                               const std::string& question, const EngineConfig& config,
                               const Backends& backends) {
    if (text::trim(question).empty()) throw ValidationError("assemble: question must be non-empty");
    validate_zone(zone_state, conversation);
    config.budget.validate();

    const Tokenizer& tok = *backends.tokenizer;
    const TokenBudget& budget = config.budget;
    const RenderLabels& labels = config.labels;
    const int n = static_cast<int>(conversation.turns.size());
    const int floor_tokens = budget.unc_floor_tokens();

    std::vector<std::string> lines;
    lines.reserve(static_cast<size_t>(n));
    for (const Turn& t : conversation.turns) lines.push_back(render_turn_line(t));

    int m = zone_state.entity_boundary;
    int p = zone_state.summary_boundary;
    std::vector<EntityItem> entity_items = zone_state.entity_items;
    std::string summary = zone_state.summary_text;

    auto entity_segment = [&] { return render_entity_segment(entity_items, labels.entities); };
    auto unc_text = [&](int from) { return engine_detail::join_lines(lines, from, n); };
    auto total_of = [&](int cur_p) {
        return tok.count_tokens(engine_detail::render_context(
            labels, conversation.base_passage, entity_segment(), summary, unc_text(cur_p),
            question));
    };

    // Rolling re-summarization: the window is the prior summary plus the
    // newly demoted turn. Saturation = the window's raw input outgrew
    // sm_limit before capping.
    bool saturated = false;
    auto roll_into_summary = [&](int turn_index) {
        const Turn& turn = conversation.turns[static_cast<size_t>(turn_index - 1)];
        std::string input = summary.empty() ? lines[static_cast<size_t>(turn_index - 1)]
                                            : summary + "\n" + lines[static_cast<size_t>(turn_index - 1)];
        if (tok.count_tokens(input) > budget.sm_limit) saturated = true;
        summary = backends.summarizer->summarize(SummaryRequest{summary, {turn}, budget.sm_limit});
    };

    auto evict_for_eec_cap = [&] {
        if (!config.eec_max_tokens) return;
        while (!entity_items.empty() && tok.count_tokens(entity_segment()) > *config.eec_max_tokens) {
            entity_items.erase(entity_items.begin());
        }
    };

    // Step 2: summary demotions under budget pressure.
    while (p < n && total_of(p) > budget.ms_max) {
        if (m > 1 && tok.count_tokens(unc_text(p + 1)) < floor_tokens) break;
        roll_into_summary(p);
        ++p;
    }

    // Step 3: entity demotions once the summary window saturated.
    if (saturated) {
        while (p < n && m < p) {
            int unc_now = tok.count_tokens(unc_text(p));
            if (unc_now <= floor_tokens) break;
            if (tok.count_tokens(unc_text(p + 1)) < floor_tokens) break;
            const Turn& oldest_summary_turn = conversation.turns[static_cast<size_t>(m - 1)];
            std::vector<EntityItem> found =
                backends.extractor->identify(oldest_summary_turn.question, m);
            std::vector<EntityItem> from_answer =
                backends.extractor->identify(oldest_summary_turn.answer, m);
            found.insert(found.end(), from_answer.begin(), from_answer.end());
            entity_items = merge_entity_items(std::move(entity_items), found);
            ++m;
            evict_for_eec_cap();
            roll_into_summary(p);
            ++p;
        }
    }

    std::string entity_seg = entity_segment();
    std::string unmodified = unc_text(p);
    std::string rendered = engine_detail::render_context(labels, conversation.base_passage,
                                                         entity_seg, summary, unmodified, question);
    int total = tok.count_tokens(rendered);
    if (total > budget.ms_max) {
        int fixed = tok.count_tokens(engine_detail::render_context(
            labels, conversation.base_passage, "", "", "", question));
        std::string segment =
            fixed > budget.ms_max ? "base_passage+question" : "history";
        throw BudgetOverflowError(
            segment, "context for conversation '" + conversation.id + "' cannot fit ms_max=" +
                         std::to_string(budget.ms_max) + " (" + segment + " needs " +
                         std::to_string(fixed > budget.ms_max ? fixed : total) + " tokens)");
    }

    AssembleResult result;
    result.context.base_passage = conversation.base_passage;
    result.context.entity_segment = std::move(entity_seg);
    result.context.summary_segment = summary;
    result.context.unmodified_segment = std::move(unmodified);
    result.context.current_question = question;
    result.context.counts.base = tok.count_tokens(conversation.base_passage);
    result.context.counts.entities = tok.count_tokens(result.context.entity_segment);
    result.context.counts.summary = tok.count_tokens(result.context.summary_segment);
    result.context.counts.unmodified = tok.count_tokens(result.context.unmodified_segment);
    result.context.counts.question = tok.count_tokens(question);
    result.context.counts.total = total;
    result.context.total_tokens = total;
    result.context.rendered = std::move(rendered);

    result.zone = zone_state;
    result.zone.entity_boundary = m;
    result.zone.summary_boundary = p;
    result.zone.entity_items = std::move(entity_items);
    result.zone.summary_text = std::move(summary);
    return result;
}

/// Baseline assembly: a fixed turn selection with no demotion. If the
/// selection overflows the budget, whole oldest turns are dropped until it
/// fits (recorded via the truncated flag).
inline AssembledContext assemble_baseline(const Conversation& conversation,
                                          const std::string& question, StrategyKind strategy,
                                          const EngineConfig& config, const Backends& backends) {
    if (strategy.kind == Strategy::acm) {
        throw ValidationError("assemble_baseline: use assemble() for the acm strategy");
    }
    if (text::trim(question).empty()) throw ValidationError("assemble: question must be non-empty");
    config.budget.validate();

    const Tokenizer& tok = *backends.tokenizer;
    const RenderLabels& labels = config.labels;
    const int n = static_cast<int>(conversation.turns.size());

    int first_turn = 1;
    switch (strategy.kind) {
        case Strategy::pipeline_immediate: first_turn = n; break;
        case Strategy::k_turn: first_turn = n - strategy.k + 1; break;
        case Strategy::full_history: first_turn = 1; break;
        case Strategy::acm: break;
    }
    if (first_turn < 1) first_turn = 1;

    std::vector<std::string> lines;
    for (const Turn& t : conversation.turns) lines.push_back(render_turn_line(t));

    auto render_from = [&](int from) {
        std::string unmodified = from <= n ? engine_detail::join_lines(lines, from, n) : "";
        return engine_detail::render_context(labels, conversation.base_passage, "", "", unmodified,
                                             question);
    };

    bool truncated = false;
    std::string rendered = render_from(first_turn);
    while (tok.count_tokens(rendered) > config.budget.ms_max && first_turn <= n) {
        ++first_turn;
        truncated = true;
        rendered = render_from(first_turn);
    }
    int total = tok.count_tokens(rendered);
    if (total > config.budget.ms_max) {
        throw BudgetOverflowError("base_passage+question",
                                  "base passage + question need " + std::to_string(total) +
                                      " tokens, over ms_max=" +
                                      std::to_string(config.budget.ms_max));
    }

    AssembledContext ctx;
    ctx.base_passage = conversation.base_passage;
    ctx.unmodified_segment = first_turn <= n ? engine_detail::join_lines(lines, first_turn, n) : "";
    ctx.current_question = question;
    ctx.counts.base = tok.count_tokens(conversation.base_passage);
    ctx.counts.unmodified = tok.count_tokens(ctx.unmodified_segment);
    ctx.counts.question = tok.count_tokens(question);
    ctx.counts.total = total;
    ctx.total_tokens = total;
    ctx.truncated = truncated;
    ctx.rendered = std::move(rendered);
    return ctx;
}

struct AnswerResult {
    std::string answer;
    AssembledContext context;
    ZoneState zone;
    Conversation conversation;
};

/// Assemble + query the QA backend + record the exchange. On any error the
/// inputs are untouched (value semantics: the extended conversation is part
/// of the result).
inline AnswerResult answer_question(const Conversation& conversation, const ZoneState& zone_state,
                                    const std::string& question, StrategyKind strategy,
                                    const EngineConfig& config, const Backends& backends) {
    AnswerResult result;
    if (strategy.kind == Strategy::acm) {
        AssembleResult assembled = assemble(conversation, zone_state, question, config, backends);
        result.context = std::move(assembled.context);
        result.zone = std::move(assembled.zone);
    } else {
        result.context = assemble_baseline(conversation, question, strategy, config, backends);
        result.zone = zone_state;
    }
    result.answer = backends.qa->answer(result.context.rendered, question);
    result.conversation = record_turn(conversation, question, result.answer);
    return result;
}

} // namespace acm
