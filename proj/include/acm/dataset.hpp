#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acm/core.hpp"
#include "acm/errors.hpp"
#include "acm/metrics.hpp"

namespace acm {

enum class DatasetFormat { coqa, chat };

inline DatasetFormat dataset_format_from_string(const std::string& s) {
    if (s == "coqa") return DatasetFormat::coqa;
    if (s == "chat") return DatasetFormat::chat;
    throw ValidationError("unknown dataset format '" + s + "' (expected coqa or chat)");
}

namespace dataset_detail {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("file '" + path + "' is not readable");
    try {
        nlohmann::json root;
        in >> root;
        return root;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("file '" + path + "': " + e.what());
    }
}

inline Conversation parse_coqa_record(const nlohmann::json& record, size_t index) {
    auto where = [&] { return "record " + std::to_string(index); };
    if (!record.is_object()) throw ParseError(where() + ": expected an object");
    if (!record.contains("id") || !record["id"].is_string()) {
        throw ParseError(where() + ": missing string field 'id'");
    }
    std::string id = record["id"].get<std::string>();
    if (!record.contains("story") || !record["story"].is_string()) {
        throw ParseError(where() + " (id '" + id + "'): missing string field 'story'");
    }
    if (!record.contains("questions") || !record["questions"].is_array() ||
        !record.contains("answers") || !record["answers"].is_array()) {
        throw ParseError(where() + " (id '" + id + "'): missing 'questions'/'answers' arrays");
    }

    auto index_by_turn = [&](const nlohmann::json& entries, const char* field) {
        std::map<int, std::string> by_turn;
        for (const auto& entry : entries) {
            if (!entry.is_object() || !entry.contains("turn_id") ||
                !entry["turn_id"].is_number_integer() || !entry.contains("input_text") ||
                !entry["input_text"].is_string()) {
                throw ParseError(where() + " (id '" + id + "'): each of '" + field +
                                 "' needs integer 'turn_id' and string 'input_text'");
            }
            int turn = entry["turn_id"].get<int>();
            if (!by_turn.emplace(turn, entry["input_text"].get<std::string>()).second) {
                throw ParseError(where() + " (id '" + id + "'): duplicate turn " +
                                 std::to_string(turn) + " in '" + field + "'");
            }
        }
        return by_turn;
    };
    std::map<int, std::string> questions = index_by_turn(record["questions"], "questions");
    std::map<int, std::string> answers = index_by_turn(record["answers"], "answers");

    Conversation conversation = new_conversation(id, record["story"].get<std::string>());
    int expected = 1;
    for (const auto& [turn, question] : questions) {
        if (turn != expected) {
            throw ParseError(where() + " (id '" + id + "'): questions missing turn " +
                             std::to_string(expected));
        }
        auto answer = answers.find(turn);
        if (answer == answers.end()) {
            throw ParseError(where() + " (id '" + id + "'): answers missing turn " +
                             std::to_string(turn));
        }
        conversation = record_turn(std::move(conversation), question, answer->second);
        ++expected;
    }
    if (answers.size() != questions.size()) {
        for (const auto& [turn, answer] : answers) {
            if (!questions.count(turn)) {
                throw ParseError(where() + " (id '" + id + "'): questions missing turn " +
                                 std::to_string(turn));
            }
        }
    }
    return conversation;
}

inline Conversation parse_chat_record(const nlohmann::json& record, size_t index) {
    auto where = [&] { return "record " + std::to_string(index); };
    if (!record.is_object() || !record.contains("id") || !record["id"].is_string() ||
        !record.contains("story") || !record["story"].is_string() ||
        !record.contains("messages") || !record["messages"].is_array()) {
        throw ParseError(where() + ": chat records need 'id', 'story' and a 'messages' array");
    }
    std::string id = record["id"].get<std::string>();
    Conversation conversation = new_conversation(id, record["story"].get<std::string>());
    const auto& messages = record["messages"];
    if (messages.size() % 2 != 0) {
        throw ParseError(where() + " (id '" + id + "'): messages must pair user/assistant turns");
    }
    for (size_t i = 0; i < messages.size(); i += 2) {
        const auto& user = messages[i];
        const auto& assistant = messages[i + 1];
        auto check = [&](const nlohmann::json& msg, const char* role) {
            if (!msg.is_object() || !msg.contains("role") || msg["role"] != role ||
                !msg.contains("content") || !msg["content"].is_string()) {
                throw ParseError(where() + " (id '" + id + "'): message " +
                                 std::to_string(i) + " must alternate user/assistant with string 'content'");
            }
        };
        check(user, "user");
        check(assistant, "assistant");
        conversation = record_turn(std::move(conversation), user["content"].get<std::string>(),
                                   assistant["content"].get<std::string>());
    }
    return conversation;
}

} // namespace dataset_detail

/// Loads a dataset file into conversations (gold answers attached per turn).
/// coqa format: {"data": [{"id", "story", "questions": [{"turn_id",
/// "input_text"}], "answers": [...]}]}; chat format pairs user/assistant
/// messages instead.
inline std::vector<Conversation> load_conversations(const std::string& path,
                                                    DatasetFormat format = DatasetFormat::coqa) {
    nlohmann::json root = dataset_detail::read_json_file(path);
    if (!root.is_object() || !root.contains("data") || !root["data"].is_array()) {
        throw ParseError("file '" + path + "': expected top-level object with a 'data' array");
    }
    std::vector<Conversation> conversations;
    size_t index = 0;
    for (const auto& record : root["data"]) {
        conversations.push_back(format == DatasetFormat::coqa
                                    ? dataset_detail::parse_coqa_record(record, index)
                                    : dataset_detail::parse_chat_record(record, index));
        ++index;
    }
    return conversations;
}

/// One transcript line: everything needed to audit a single QA exchange.
struct TranscriptEntry {
    std::string conversation_id;
    int turn_index = 0;
    std::string strategy;
    std::string rendered_context;
    int entity_boundary = 1;  // m
    int summary_boundary = 1; // p
    SegmentTokenCounts counts;
    std::string prediction;
    std::string gold;

    bool operator==(const TranscriptEntry& other) const {
        return conversation_id == other.conversation_id && turn_index == other.turn_index &&
               strategy == other.strategy && rendered_context == other.rendered_context &&
               entity_boundary == other.entity_boundary &&
               summary_boundary == other.summary_boundary && counts.base == other.counts.base &&
               counts.entities == other.counts.entities && counts.summary == other.counts.summary &&
               counts.unmodified == other.counts.unmodified &&
               counts.question == other.counts.question && counts.total == other.counts.total &&
               prediction == other.prediction && gold == other.gold;
    }
};

inline nlohmann::json to_json(const TranscriptEntry& e) {
    return nlohmann::json{
        {"conversation_id", e.conversation_id},
        {"turn_index", e.turn_index},
        {"strategy", e.strategy},
        {"rendered_context", e.rendered_context},
        {"zone_boundaries", {{"m", e.entity_boundary}, {"p", e.summary_boundary}}},
        {"segment_token_counts",
         {{"base", e.counts.base},
          {"entities", e.counts.entities},
          {"summary", e.counts.summary},
          {"unmodified", e.counts.unmodified},
          {"question", e.counts.question},
          {"total", e.counts.total}}},
        {"prediction", e.prediction},
        {"gold", e.gold},
    };
}

/// JSON-lines transcript, one self-contained object per line, append order.
inline void write_transcript(const std::string& path, const std::vector<TranscriptEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw IoError("transcript path '" + path + "' is not writable");
    for (const TranscriptEntry& e : entries) out << to_json(e).dump() << "\n";
    if (!out) throw IoError("failed writing transcript '" + path + "'");
}

inline std::vector<TranscriptEntry> read_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("transcript '" + path + "' is not readable");
    std::vector<TranscriptEntry> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("transcript '" + path + "' line " + std::to_string(line_no) + ": " +
                             e.what());
        }
        try {
            TranscriptEntry e;
            e.conversation_id = j.at("conversation_id").get<std::string>();
            e.turn_index = j.at("turn_index").get<int>();
            e.strategy = j.at("strategy").get<std::string>();
            e.rendered_context = j.at("rendered_context").get<std::string>();
            e.entity_boundary = j.at("zone_boundaries").at("m").get<int>();
            e.summary_boundary = j.at("zone_boundaries").at("p").get<int>();
            const auto& c = j.at("segment_token_counts");
            e.counts.base = c.at("base").get<int>();
            e.counts.entities = c.at("entities").get<int>();
            e.counts.summary = c.at("summary").get<int>();
            e.counts.unmodified = c.at("unmodified").get<int>();
            e.counts.question = c.at("question").get<int>();
            e.counts.total = c.at("total").get<int>();
            e.prediction = j.at("prediction").get<std::string>();
            e.gold = j.at("gold").get<std::string>();
            entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("transcript '" + path + "' line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return entries;
}

namespace dataset_detail {

inline std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string signed_two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.2f", v);
    return buf;
}

} // namespace dataset_detail

inline nlohmann::json to_json(const RunReport& report) {
    nlohmann::json records = nlohmann::json::array();
    for (const EvalRecord& r : report.records) {
        records.push_back({{"conversation_id", r.conversation_id},
                           {"turn_index", r.turn_index},
                           {"prediction", r.prediction},
                           {"gold", r.gold},
                           {"f1", r.f1},
                           {"rouge1", r.rouge1},
                           {"rougeL", r.rougeL},
                           {"bleu", r.bleu}});
    }
    return nlohmann::json{{"strategy", report.strategy}, {"averaging", report.averaging},
                          {"record_count", report.records.size()},
                          {"f1", report.f1},   {"rouge1", report.rouge1},
                          {"rougeL", report.rougeL}, {"bleu", report.bleu},
                          {"records", std::move(records)}};
}

inline RunReport run_report_from_json(const nlohmann::json& j) {
    try {
        RunReport report;
        report.strategy = j.at("strategy").get<std::string>();
        report.averaging = j.at("averaging").get<std::string>();
        report.f1 = j.at("f1").get<double>();
        report.rouge1 = j.at("rouge1").get<double>();
        report.rougeL = j.at("rougeL").get<double>();
        report.bleu = j.at("bleu").get<double>();
        for (const auto& rec : j.at("records")) {
            EvalRecord r;
            r.conversation_id = rec.at("conversation_id").get<std::string>();
            r.turn_index = rec.at("turn_index").get<int>();
            r.prediction = rec.at("prediction").get<std::string>();
            r.gold = rec.at("gold").get<std::string>();
            r.f1 = rec.at("f1").get<double>();
            r.rouge1 = rec.at("rouge1").get<double>();
            r.rougeL = rec.at("rougeL").get<double>();
            r.bleu = rec.at("bleu").get<double>();
            report.records.push_back(std::move(r));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
}

/// Aligned plain-text table, one row per strategy. Rows after the first are
/// annotated with their delta against the first row, "(+10.78)" style.
inline std::string format_report_table(const std::vector<RunReport>& reports) {
    using dataset_detail::signed_two_decimals;
    using dataset_detail::two_decimals;
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Strategy", "Records", "F1", "ROUGE-L", "ROUGE-1", "BLEU"});
    for (size_t i = 0; i < reports.size(); ++i) {
        const RunReport& r = reports[i];
        auto cell = [&](double value, double base) {
            std::string s = two_decimals(value);
            if (i > 0) s += " (" + signed_two_decimals(value - base) + ")";
            return s;
        };
        const RunReport& first = reports.front();
        rows.push_back({r.strategy, std::to_string(r.records.size()), cell(r.f1, first.f1),
                        cell(r.rougeL, first.rougeL), cell(r.rouge1, first.rouge1),
                        cell(r.bleu, first.bleu)});
    }
    std::vector<size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out << "  ";
            out << row[c];
            if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size(), ' ');
        }
        out << "\n";
    }
    return out.str();
}

/// Writes the machine-readable JSON report and the aligned text table.
inline void write_report(const std::string& json_path, const std::string& table_path,
                         const std::vector<RunReport>& reports) {
    nlohmann::json j;
    j["averaging"] = reports.empty() ? "macro-per-question" : reports.front().averaging;
    nlohmann::json strategies = nlohmann::json::array();
    for (size_t i = 0; i < reports.size(); ++i) {
        nlohmann::json entry = to_json(reports[i]);
        if (i > 0) {
            entry["delta_vs_first"] = {{"f1", reports[i].f1 - reports.front().f1},
                                       {"rouge1", reports[i].rouge1 - reports.front().rouge1},
                                       {"rougeL", reports[i].rougeL - reports.front().rougeL},
                                       {"bleu", reports[i].bleu - reports.front().bleu}};
        }
        strategies.push_back(std::move(entry));
    }
    j["strategies"] = std::move(strategies);

    std::ofstream json_out(json_path);
    if (!json_out) throw IoError("report path '" + json_path + "' is not writable");
    json_out << j.dump(2) << "\n";
    if (!json_out) throw IoError("failed writing report '" + json_path + "'");

    std::ofstream table_out(table_path);
    if (!table_out) throw IoError("report path '" + table_path + "' is not writable");
    table_out << format_report_table(reports);
    if (!table_out) throw IoError("failed writing report '" + table_path + "'");
}

inline std::vector<RunReport> read_report(const std::string& json_path) {
    nlohmann::json root = dataset_detail::read_json_file(json_path);
    if (!root.is_object() || !root.contains("strategies") || !root["strategies"].is_array()) {
        throw ParseError("report '" + json_path + "': expected a 'strategies' array");
    }
    std::vector<RunReport> reports;
    for (const auto& entry : root["strategies"]) reports.push_back(run_report_from_json(entry));
    return reports;
}

} // namespace acm
