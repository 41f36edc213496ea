#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "acm/config.hpp"
#include "acm/dataset.hpp"
#include "acm/engine.hpp"
#include "acm/errors.hpp"
#include "acm/metrics.hpp"
#include "acm/registry.hpp"

namespace acm {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct RunOptions {
    std::string dataset_path;
    std::string config_path; // empty = defaults
    std::string out_dir;
    std::vector<StrategyKind> strategies;
    DatasetFormat format = DatasetFormat::coqa;
    int limit = 0;         // 0 = all conversations
    double sample = 1.0;   // fraction of conversations, selected by seed
    unsigned seed = 0;
    bool fail_fast = false;
    int jobs = 1;
};

namespace harness_detail {

inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

inline void log(const std::string& level, const std::string& module, const std::string& message) {
    std::lock_guard<std::mutex> lock(log_mutex());
    std::cerr << "[" << level << "] module=" << module << " " << message << "\n";
}

inline Config load_config(const RunOptions& opts) {
    return opts.config_path.empty() ? Config{} : Config::load(opts.config_path);
}

/// Deterministic subset: --limit keeps the first N, --sample keeps a
/// seed-shuffled fraction re-emitted in original order.
inline std::vector<Conversation> select_conversations(std::vector<Conversation> all,
                                                      const RunOptions& opts) {
    if (opts.sample < 1.0) {
        std::vector<size_t> indices(all.size());
        std::iota(indices.begin(), indices.end(), size_t{0});
        std::mt19937 rng(opts.seed);
        std::shuffle(indices.begin(), indices.end(), rng);
        size_t keep = static_cast<size_t>(std::ceil(opts.sample * static_cast<double>(all.size())));
        indices.resize(std::min(keep, indices.size()));
        std::sort(indices.begin(), indices.end());
        std::vector<Conversation> selected;
        selected.reserve(indices.size());
        for (size_t i : indices) selected.push_back(std::move(all[i]));
        all = std::move(selected);
    }
    if (opts.limit > 0 && static_cast<size_t>(opts.limit) < all.size()) {
        all.resize(static_cast<size_t>(opts.limit));
    }
    return all;
}

struct ConversationRun {
    std::vector<EvalRecord> records;
    std::vector<TranscriptEntry> transcript;
    bool failed = false;
    std::string error;
};

/// Replays one conversation under one strategy, filling `run` as it goes
/// (on error the caller can read how far it got). History is the dataset's
/// own gold exchanges (teacher forcing); the backend prediction only goes
/// into the transcript and scores.
inline void replay_conversation(const Conversation& gold, StrategyKind strategy,
                                const EngineConfig& engine_cfg, const Backends& backends,
                                ConversationRun& run) {
    Conversation live = new_conversation(gold.id, gold.base_passage);
    ZoneState zone = ZoneState::initial(gold.id);
    for (const Turn& turn : gold.turns) {
        AssembledContext ctx;
        if (strategy.kind == Strategy::acm) {
            AssembleResult assembled = assemble(live, zone, turn.question, engine_cfg, backends);
            ctx = std::move(assembled.context);
            zone = std::move(assembled.zone);
        } else {
            ctx = assemble_baseline(live, turn.question, strategy, engine_cfg, backends);
        }
        std::string prediction = backends.qa->answer(ctx.rendered, turn.question);
        run.records.push_back(score_record(gold.id, turn.index, prediction, turn.answer));

        TranscriptEntry entry;
        entry.conversation_id = gold.id;
        entry.turn_index = turn.index;
        entry.strategy = strategy.to_string();
        entry.rendered_context = ctx.rendered;
        entry.entity_boundary = zone.entity_boundary;
        entry.summary_boundary = zone.summary_boundary;
        entry.counts = ctx.counts;
        entry.prediction = std::move(prediction);
        entry.gold = turn.answer;
        run.transcript.push_back(std::move(entry));

        live = record_turn(std::move(live), turn.question, turn.answer);
    }
}

struct StrategyRun {
    RunReport report;
    std::vector<TranscriptEntry> transcript;
    size_t skipped = 0;
};

inline StrategyRun run_strategy(const std::vector<Conversation>& conversations,
                                StrategyKind strategy, const EngineConfig& engine_cfg,
                                const Backends& backends, bool fail_fast, int jobs) {
    std::vector<ConversationRun> slots(conversations.size());
    std::atomic<size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= conversations.size()) return;
            {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (fatal) return;
            }
            try {
                replay_conversation(conversations[i], strategy, engine_cfg, backends, slots[i]);
            } catch (const Error& e) {
                size_t turn = slots[i].records.size() + 1;
                std::ostringstream msg;
                msg << "conversation=" << conversations[i].id << " turn=" << turn
                    << " strategy=" << strategy.to_string() << " error: " << e.what();
                if (fail_fast) {
                    std::lock_guard<std::mutex> lock(fatal_mutex);
                    if (!fatal) fatal = std::current_exception();
                    return;
                }
                log("warn", "replay", msg.str() + " (conversation skipped)");
                slots[i] = ConversationRun{};
                slots[i].failed = true;
                slots[i].error = msg.str();
            }
        }
    };

    int thread_count = std::max(1, jobs);
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    StrategyRun out;
    std::vector<EvalRecord> records;
    for (ConversationRun& slot : slots) {
        if (slot.failed) {
            ++out.skipped;
            continue;
        }
        records.insert(records.end(), slot.records.begin(), slot.records.end());
        out.transcript.insert(out.transcript.end(), slot.transcript.begin(),
                              slot.transcript.end());
    }
    if (records.empty()) {
        throw ValidationError("run produced no records (all " +
                              std::to_string(conversations.size()) + " conversations failed)");
    }
    out.report = aggregate(std::move(records), strategy.to_string());
    return out;
}

inline int exit_code_for(const Error& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e)) {
        return kExitValidation;
    }
    return kExitRuntime;
}

inline std::filesystem::path ensure_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    return dir;
}

} // namespace harness_detail

/// Replays a dataset under the configured strategies, writing one transcript
/// per strategy plus a combined report (JSON + text table with deltas
/// against the first strategy). cmd_replay and cmd_compare share this body;
/// compare is replay with several strategies on identical inputs.
inline int run_replay(const RunOptions& opts) {
    using namespace harness_detail;
    try {
        Config cfg = load_config(opts);
        std::vector<StrategyKind> strategies =
            opts.strategies.empty() ? std::vector<StrategyKind>{cfg.strategy} : opts.strategies;
        EngineConfig engine_cfg = cfg.engine();
        Backends backends = build_backends(cfg);
        std::vector<Conversation> conversations =
            select_conversations(load_conversations(opts.dataset_path, opts.format), opts);
        if (conversations.empty()) throw ValidationError("dataset selection is empty");

        std::filesystem::path dir = ensure_out_dir(opts.out_dir);
        std::vector<RunReport> reports;
        for (StrategyKind strategy : strategies) {
            StrategyRun run = run_strategy(conversations, strategy, engine_cfg, backends,
                                           opts.fail_fast, opts.jobs);
            write_transcript((dir / ("transcript-" + strategy.to_string() + ".jsonl")).string(),
                             run.transcript);
            if (run.skipped > 0) {
                log("warn", "replay",
                    "strategy=" + strategy.to_string() + " skipped=" + std::to_string(run.skipped));
            }
            log("info", "replay",
                "strategy=" + strategy.to_string() +
                    " records=" + std::to_string(run.report.records.size()));
            reports.push_back(std::move(run.report));
        }
        write_report((dir / "report.json").string(), (dir / "report.txt").string(), reports);
        return kExitOk;
    } catch (const Error& e) {
        harness_detail::log("error", "replay", e.what());
        return harness_detail::exit_code_for(e);
    }
}

inline int cmd_replay(const RunOptions& opts) { return run_replay(opts); }

inline int cmd_compare(RunOptions opts) {
    if (opts.strategies.size() < 2) {
        harness_detail::log("error", "compare", "compare needs at least two strategies");
        return kExitValidation;
    }
    return run_replay(opts);
}

/// Sidecar reference summaries for cmd_sweep:
/// {"references": [{"id", "turn_count", "summary"}, ...]}.
struct SweepReferences {
    std::map<std::pair<std::string, int>, std::string> by_key;

    static SweepReferences load(const std::string& path) {
        nlohmann::json root = dataset_detail::read_json_file(path);
        if (!root.is_object() || !root.contains("references") || !root["references"].is_array()) {
            throw ParseError("references file '" + path + "': expected a 'references' array");
        }
        SweepReferences refs;
        for (const auto& entry : root["references"]) {
            if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string() ||
                !entry.contains("turn_count") || !entry["turn_count"].is_number_integer() ||
                !entry.contains("summary") || !entry["summary"].is_string()) {
                throw ParseError("references file '" + path +
                                 "': entries need 'id', 'turn_count', 'summary'");
            }
            refs.by_key[{entry["id"].get<std::string>(), entry["turn_count"].get<int>()}] =
                entry["summary"].get<std::string>();
        }
        return refs;
    }
};

struct SweepOptions {
    std::string dataset_path;
    std::string config_path;
    std::string references_path;
    std::string out_path; // CSV
    std::vector<int> turn_counts = {5, 10, 15, 20};
    std::vector<int> token_grid;
    DatasetFormat format = DatasetFormat::coqa;
};

struct SweepCell {
    int turn_count = 0;
    int max_tokens = 0;
    double mean_rouge_l = 0.0;
};

/// Summarizes the first turn_count turns of each conversation at each token
/// cap and scores ROUGE-L against the sidecar reference summaries.
inline std::vector<SweepCell> run_sweep(const SweepOptions& opts) {
    Config cfg = opts.config_path.empty() ? Config{} : Config::load(opts.config_path);
    Backends backends = build_backends(cfg);
    std::vector<Conversation> conversations = load_conversations(opts.dataset_path, opts.format);
    SweepReferences refs = SweepReferences::load(opts.references_path);

    if (opts.token_grid.empty()) throw ValidationError("sweep: token grid is empty");
    if (!std::is_sorted(opts.token_grid.begin(), opts.token_grid.end())) {
        throw ValidationError("sweep: token grid must be ascending");
    }
    for (int turn_count : opts.turn_counts) {
        if (turn_count < 1) throw ValidationError("sweep: turn counts must be >= 1");
    }

    // Validate reference coverage up front; report every missing id at once.
    std::vector<std::string> missing;
    for (int turn_count : opts.turn_counts) {
        bool any = false;
        for (const Conversation& c : conversations) {
            if (static_cast<int>(c.turns.size()) < turn_count) continue;
            any = true;
            if (!refs.by_key.count({c.id, turn_count})) {
                missing.push_back(c.id + "@" + std::to_string(turn_count));
            }
        }
        if (!any) {
            throw ValidationError("sweep: no conversation has " + std::to_string(turn_count) +
                                  " turns");
        }
    }
    if (!missing.empty()) {
        std::string joined;
        for (size_t i = 0; i < missing.size(); ++i) {
            if (i) joined += ", ";
            joined += missing[i];
        }
        throw ValidationError("sweep: missing reference summaries for: " + joined);
    }

    std::vector<SweepCell> cells;
    for (int turn_count : opts.turn_counts) {
        for (int max_tokens : opts.token_grid) {
            double sum = 0.0;
            int scored = 0;
            for (const Conversation& c : conversations) {
                if (static_cast<int>(c.turns.size()) < turn_count) continue;
                std::vector<Turn> head(c.turns.begin(), c.turns.begin() + turn_count);
                std::string summary =
                    backends.summarizer->summarize(SummaryRequest{"", std::move(head), max_tokens});
                sum += rouge_l(summary, refs.by_key.at({c.id, turn_count}));
                ++scored;
            }
            cells.push_back({turn_count, max_tokens, sum / static_cast<double>(scored)});
        }
    }
    return cells;
}

inline int cmd_sweep(const SweepOptions& opts) {
    try {
        std::vector<SweepCell> cells = run_sweep(opts);
        std::ofstream out(opts.out_path);
        if (!out) throw IoError("sweep output '" + opts.out_path + "' is not writable");
        out << "turn_count,max_tokens,mean_rouge_l\n";
        char buf[64];
        for (const SweepCell& cell : cells) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.6f", cell.turn_count, cell.max_tokens,
                          cell.mean_rouge_l);
            out << buf << "\n";
        }
        if (!out) throw IoError("failed writing sweep output '" + opts.out_path + "'");
        return kExitOk;
    } catch (const Error& e) {
        harness_detail::log("error", "sweep", e.what());
        return harness_detail::exit_code_for(e);
    }
}

/// Scores a JSON-lines predictions file:
/// {"conversation_id", "turn_index", "prediction", "gold"} per line.
inline RunReport score_predictions_file(const std::string& predictions_path,
                                        const std::string& label) {
    std::ifstream in(predictions_path);
    if (!in) throw IoError("predictions file '" + predictions_path + "' is not readable");
    std::vector<EvalRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("predictions file '" + predictions_path + "' line " +
                             std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("conversation_id") || !j.contains("turn_index") ||
            !j.contains("prediction") || !j.contains("gold")) {
            throw ParseError("predictions file '" + predictions_path + "' line " +
                             std::to_string(line_no) +
                             ": needs conversation_id, turn_index, prediction, gold");
        }
        records.push_back(score_record(j["conversation_id"].get<std::string>(),
                                       j["turn_index"].get<int>(),
                                       j["prediction"].get<std::string>(),
                                       j["gold"].get<std::string>()));
    }
    if (records.empty()) {
        throw ValidationError("predictions file '" + predictions_path + "' has no records");
    }
    return aggregate(std::move(records), label);
}

inline int cmd_score(const std::string& predictions_path, const std::string& out_dir,
                     const std::string& label = "scored") {
    try {
        RunReport report = score_predictions_file(predictions_path, label);
        std::filesystem::path dir = harness_detail::ensure_out_dir(out_dir);
        write_report((dir / "report.json").string(), (dir / "report.txt").string(), {report});
        return kExitOk;
    } catch (const Error& e) {
        harness_detail::log("error", "score", e.what());
        return harness_detail::exit_code_for(e);
    }
}

} // namespace acm
