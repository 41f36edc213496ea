#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acm/engine.hpp"
#include "acm/errors.hpp"

namespace acm {

/// Full run configuration, loadable from a JSON file. Unknown keys are
/// rejected by name; absent keys fall back to the defaults below.
struct Config {
    TokenBudget budget; // ms_max=1024, sm_limit=120, threshold=0.75
    std::string tokenizer_name = "reference-ws";
    std::string summarizer_name = "reference-extractive";
    std::string summarizer_endpoint;
    std::string extractor_name = "reference-rules";
    std::string extractor_endpoint;
    std::optional<int> eec_max_tokens;
    std::string qa_name = "stub-overlap";
    std::string qa_endpoint;
    double qa_timeout_s = 30.0;
    int qa_retries = 3;
    int qa_max_inflight = 4;
    int qa_backoff_ms = 200;
    RenderLabels labels;
    StrategyKind strategy = StrategyKind::acm();

    EngineConfig engine() const {
        EngineConfig cfg;
        cfg.budget = budget;
        cfg.tokenizer = tokenizer_name;
        cfg.summarizer = summarizer_name;
        cfg.entity_extractor = extractor_name;
        cfg.qa = qa_name;
        cfg.labels = labels;
        cfg.eec_max_tokens = eec_max_tokens;
        return cfg;
    }

    static Config from_json(const nlohmann::json& root) {
        if (!root.is_object()) throw ValidationError("config: top level must be an object");
        Config cfg;
        for (const auto& [section, value] : root.items()) {
            if (section == "budget") {
                expect_object(section, value);
                for (const auto& [key, v] : value.items()) {
                    if (key == "ms_max") cfg.budget.ms_max = expect_int("budget.ms_max", v);
                    else if (key == "sm_limit") cfg.budget.sm_limit = expect_int("budget.sm_limit", v);
                    else if (key == "threshold")
                        cfg.budget.unc_floor_fraction = expect_number("budget.threshold", v);
                    else throw_unknown("budget." + key);
                }
            } else if (section == "tokenizer") {
                expect_object(section, value);
                for (const auto& [key, v] : value.items()) {
                    if (key == "name") cfg.tokenizer_name = expect_string("tokenizer.name", v);
                    else throw_unknown("tokenizer." + key);
                }
            } else if (section == "summarizer") {
                expect_object(section, value);
                for (const auto& [key, v] : value.items()) {
                    if (key == "name") cfg.summarizer_name = expect_string("summarizer.name", v);
                    else if (key == "endpoint")
                        cfg.summarizer_endpoint = expect_string("summarizer.endpoint", v);
                    else throw_unknown("summarizer." + key);
                }
            } else if (section == "entity_extractor") {
                expect_object(section, value);
                for (const auto& [key, v] : value.items()) {
                    if (key == "name") cfg.extractor_name = expect_string("entity_extractor.name", v);
                    else if (key == "endpoint")
                        cfg.extractor_endpoint = expect_string("entity_extractor.endpoint", v);
                    else if (key == "eec_max_tokens")
                        cfg.eec_max_tokens = expect_int("entity_extractor.eec_max_tokens", v);
                    else throw_unknown("entity_extractor." + key);
                }
            } else if (section == "qa") {
                expect_object(section, value);
                for (const auto& [key, v] : value.items()) {
                    if (key == "name") cfg.qa_name = expect_string("qa.name", v);
                    else if (key == "endpoint") cfg.qa_endpoint = expect_string("qa.endpoint", v);
                    else if (key == "timeout_s") cfg.qa_timeout_s = expect_number("qa.timeout_s", v);
                    else if (key == "retries") cfg.qa_retries = expect_int("qa.retries", v);
                    else if (key == "max_inflight")
                        cfg.qa_max_inflight = expect_int("qa.max_inflight", v);
                    else if (key == "backoff_ms") cfg.qa_backoff_ms = expect_int("qa.backoff_ms", v);
                    else throw_unknown("qa." + key);
                }
            } else if (section == "render") {
                expect_object(section, value);
                for (const auto& [key, v] : value.items()) {
                    if (key != "labels") throw_unknown("render." + key);
                    expect_object("render.labels", v);
                    for (const auto& [label, lv] : v.items()) {
                        std::string path = "render.labels." + label;
                        if (label == "passage") cfg.labels.passage = expect_string(path, lv);
                        else if (label == "entities") cfg.labels.entities = expect_string(path, lv);
                        else if (label == "summary") cfg.labels.summary = expect_string(path, lv);
                        else if (label == "conversation")
                            cfg.labels.conversation = expect_string(path, lv);
                        else if (label == "question") cfg.labels.question = expect_string(path, lv);
                        else throw_unknown(path);
                    }
                }
            } else if (section == "strategy") {
                cfg.strategy = StrategyKind::parse(expect_string("strategy", value));
            } else {
                throw_unknown(section);
            }
        }
        cfg.budget.validate();
        if (cfg.qa_retries < 0) throw ValidationError("config: qa.retries must be >= 0");
        if (cfg.qa_max_inflight < 1) throw ValidationError("config: qa.max_inflight must be >= 1");
        if (cfg.eec_max_tokens && *cfg.eec_max_tokens <= 0) {
            throw ValidationError("config: entity_extractor.eec_max_tokens must be positive");
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("config file '" + path + "' is not readable");
        nlohmann::json root;
        try {
            in >> root;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("config file '" + path + "': " + e.what());
        }
        return from_json(root);
    }

private:
    [[noreturn]] static void throw_unknown(const std::string& key) {
        throw ValidationError("unknown config key '" + key + "'");
    }
    static void expect_object(const std::string& key, const nlohmann::json& v) {
        if (!v.is_object()) throw ValidationError("config key '" + key + "' must be an object");
    }
    static int expect_int(const std::string& key, const nlohmann::json& v) {
        if (!v.is_number_integer()) {
            throw ValidationError("config key '" + key + "' must be an integer");
        }
        return v.get<int>();
    }
    static double expect_number(const std::string& key, const nlohmann::json& v) {
        if (!v.is_number()) throw ValidationError("config key '" + key + "' must be a number");
        return v.get<double>();
    }
    static std::string expect_string(const std::string& key, const nlohmann::json& v) {
        if (!v.is_string()) throw ValidationError("config key '" + key + "' must be a string");
        return v.get<std::string>();
    }
};

} // namespace acm
