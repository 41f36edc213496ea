// acm — context-managed conversational QA harness.
//
// Subcommands:
//   replay   run one strategy over a dataset, write transcript + report
//   compare  run several strategies on identical inputs, delta report
//   sweep    summarizer token-budget sweep, CSV grid
//   score    score a JSON-lines predictions file

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acm/harness.hpp"

namespace {

std::vector<acm::StrategyKind> parse_strategies(const std::vector<std::string>& names) {
    std::vector<acm::StrategyKind> out;
    for (const std::string& name : names) out.push_back(acm::StrategyKind::parse(name));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive context management harness for conversational QA"};
    app.require_subcommand(1);

    // Shared replay/compare options.
    acm::RunOptions run_opts;
    std::string strategy_name;
    std::vector<std::string> strategy_names;
    std::string format_name = "coqa";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--dataset", run_opts.dataset_path, "dataset JSON file")->required();
        cmd->add_option("--config", run_opts.config_path, "config JSON file");
        cmd->add_option("--out", run_opts.out_dir, "output directory")->required();
        cmd->add_option("--format", format_name, "dataset format: coqa|chat");
        cmd->add_option("--limit", run_opts.limit, "use only the first N conversations");
        cmd->add_option("--sample", run_opts.sample, "deterministic sample fraction (0,1]");
        cmd->add_option("--seed", run_opts.seed, "seed for --sample selection");
        cmd->add_option("--jobs", run_opts.jobs, "parallel conversations");
        cmd->add_flag("--fail-fast", run_opts.fail_fast, "abort on the first error");
    };

    CLI::App* replay = app.add_subcommand("replay", "replay a dataset under one strategy");
    add_common(replay);
    replay->add_option("--strategy", strategy_name,
                       "acm|pipeline_immediate|full_history|k_turn:K (default from config)");

    CLI::App* compare = app.add_subcommand("compare", "compare strategies on identical inputs");
    add_common(compare);
    compare->add_option("--strategies", strategy_names, "two or more strategy names")
        ->required()
        ->delimiter(',');

    acm::SweepOptions sweep_opts;
    std::string sweep_format = "coqa";
    CLI::App* sweep = app.add_subcommand("sweep", "summarizer token-budget sweep");
    sweep->add_option("--dataset", sweep_opts.dataset_path, "dataset JSON file")->required();
    sweep->add_option("--config", sweep_opts.config_path, "config JSON file");
    sweep->add_option("--references", sweep_opts.references_path,
                      "sidecar reference summaries JSON")
        ->required();
    sweep->add_option("--out", sweep_opts.out_path, "output CSV path")->required();
    sweep->add_option("--turns", sweep_opts.turn_counts, "turn counts (default 5,10,15,20)")
        ->delimiter(',');
    sweep->add_option("--tokens", sweep_opts.token_grid, "ascending max-token grid")
        ->required()
        ->delimiter(',');
    sweep->add_option("--format", sweep_format, "dataset format: coqa|chat");

    std::string predictions_path, score_out, score_label = "scored";
    CLI::App* score = app.add_subcommand("score", "score a predictions file");
    score->add_option("--predictions", predictions_path, "JSON-lines predictions file")
        ->required();
    score->add_option("--out", score_out, "output directory")->required();
    score->add_option("--label", score_label, "row label for the report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (replay->parsed()) {
            run_opts.format = acm::dataset_format_from_string(format_name);
            if (!strategy_name.empty()) {
                run_opts.strategies = {acm::StrategyKind::parse(strategy_name)};
            }
            return acm::cmd_replay(run_opts);
        }
        if (compare->parsed()) {
            run_opts.format = acm::dataset_format_from_string(format_name);
            run_opts.strategies = parse_strategies(strategy_names);
            return acm::cmd_compare(run_opts);
        }
        if (sweep->parsed()) {
            sweep_opts.format = acm::dataset_format_from_string(sweep_format);
            return acm::cmd_sweep(sweep_opts);
        }
        if (score->parsed()) {
            return acm::cmd_score(predictions_path, score_out, score_label);
        }
    } catch (const acm::ValidationError& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return acm::kExitValidation;
    } catch (const acm::ParseError& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return acm::kExitValidation;
    } catch (const acm::Error& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return acm::kExitRuntime;
    }
    return acm::kExitValidation;
}
