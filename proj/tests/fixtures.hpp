#pragma once

// Shared test fixtures: deterministic synthetic conversations, the
// long-dependency benchmark set, and temp-dir / dataset-file helpers.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "acm/core.hpp"
#include "acm/engine.hpp"

namespace fixtures {

inline std::string random_word(std::mt19937& rng, int min_len = 3, int max_len = 8) {
    std::uniform_int_distribution<int> len_dist(min_len, max_len);
    std::uniform_int_distribution<int> ch_dist(0, 25);
    int len = len_dist(rng);
    std::string w;
    w.reserve(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + ch_dist(rng)));
    return w;
}

inline std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

// Mixed prose: mostly lowercase words, occasional proper names, numbers and
// month dates, sentences ended with periods.
inline std::string random_prose(std::mt19937& rng, int words, bool allow_entities = true) {
    static const char* months[] = {"January", "March", "June", "October"};
    std::uniform_int_distribution<int> kind(0, 19);
    std::uniform_int_distribution<int> month_pick(0, 3);
    std::uniform_int_distribution<int> day(1, 28);
    std::uniform_int_distribution<int> year(1900, 2024);
    std::uniform_int_distribution<int> sentence_len(5, 9);

    std::string out;
    int until_period = sentence_len(rng);
    for (int i = 0; i < words; ++i) {
        if (i) out.push_back(' ');
        int k = allow_entities ? kind(rng) : 0;
        if (k == 17) {
            out += capitalize(random_word(rng));
        } else if (k == 18) {
            out += std::to_string(day(rng));
        } else if (k == 19) {
            out += months[static_cast<size_t>(month_pick(rng))];
            out.push_back(' ');
            out += std::to_string(day(rng));
            out += ", ";
            out += std::to_string(year(rng));
        } else {
            out += random_word(rng);
        }
        if (--until_period == 0) {
            out.push_back('.');
            until_period = sentence_len(rng);
        }
    }
    if (out.empty() || out.back() != '.') out.push_back('.');
    return out;
}

inline acm::Conversation random_conversation(std::mt19937& rng, const std::string& id, int turns,
                                             int base_words = 30) {
    acm::Conversation c = acm::new_conversation(id, random_prose(rng, base_words));
    std::uniform_int_distribution<int> q_words(3, 10);
    std::uniform_int_distribution<int> a_words(2, 12);
    for (int t = 0; t < turns; ++t) {
        c = acm::record_turn(std::move(c), random_prose(rng, q_words(rng)),
                             random_prose(rng, a_words(rng)));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Long-dependency benchmark: 15 turns per conversation. Turns 1-5 state five
// uniquely named facts; turns 6-10 ask about the base passage; turns 11-15
// re-ask the five facts, each exactly 10 turns after it was stated. Under a
// tight budget only a context manager that carries old turns forward (via
// the rolling summary) can answer the re-asks; the immediate-turn baseline
// cannot.
// ---------------------------------------------------------------------------

struct DependencyFixture {
    std::vector<acm::Conversation> conversations;
    acm::EngineConfig engine;
};

inline DependencyFixture dependency_fixture(int conversation_count = 30, unsigned seed = 2024) {
    std::mt19937 rng(seed);
    DependencyFixture fx;
    fx.engine.budget.ms_max = 160;
    fx.engine.budget.sm_limit = 70;
    fx.engine.budget.unc_floor_fraction = 0.75;

    for (int ci = 0; ci < conversation_count; ++ci) {
        std::vector<std::string> nouns, secrets, places, verbs;
        for (int j = 0; j < 5; ++j) {
            nouns.push_back(random_word(rng, 5, 8));
            secrets.push_back(random_word(rng, 4, 6) + std::to_string(j + 1));
            places.push_back(random_word(rng, 5, 8));
            verbs.push_back(random_word(rng, 5, 8));
        }
        // Base passage: a neutral lead sentence (so no fact sentence sits
        // right after the segment label) plus five 9-token filler facts.
        std::vector<std::string> base_sentences;
        std::string base = "a short tale of " + random_word(rng) + " follows.";
        for (int j = 0; j < 5; ++j) {
            std::string sentence = "the " + places[static_cast<size_t>(j)] + " " +
                                   verbs[static_cast<size_t>(j)] + " " + random_word(rng) + " " +
                                   random_word(rng) + " " + random_word(rng) + " " +
                                   random_word(rng) + " " + random_word(rng) + ".";
            base_sentences.push_back(sentence);
            base += " " + sentence;
        }
        acm::Conversation c = acm::new_conversation("dep-" + std::to_string(ci), base);
        // Facts: short lines with the fact name doubled, so frequency scoring
        // keeps them on top of every summary window. Worded differently from
        // the later re-asks so the two never render identical lines.
        for (int j = 0; j < 5; ++j) {
            c = acm::record_turn(std::move(c),
                                 "please state the " + nouns[static_cast<size_t>(j)] + " value",
                                 "the " + nouns[static_cast<size_t>(j)] + " is " +
                                     secrets[static_cast<size_t>(j)]);
        }
        // Fillers: answerable from the base passage under every strategy.
        for (int j = 0; j < 5; ++j) {
            c = acm::record_turn(std::move(c),
                                 "what does the " + places[static_cast<size_t>(j)] + " " +
                                     verbs[static_cast<size_t>(j)] + " there",
                                 base_sentences[static_cast<size_t>(j)]);
        }
        // Re-asks, verbatim questions, 10 turns after the fact was stated.
        for (int j = 0; j < 5; ++j) {
            c = acm::record_turn(std::move(c), "what is the " + nouns[static_cast<size_t>(j)],
                                 "the " + nouns[static_cast<size_t>(j)] + " is " +
                                     secrets[static_cast<size_t>(j)]);
        }
        fx.conversations.push_back(std::move(c));
    }
    return fx;
}

// ---------------------------------------------------------------------------
// Filesystem helpers
// ---------------------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("acm-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline nlohmann::json coqa_json(const std::vector<acm::Conversation>& conversations) {
    nlohmann::json data = nlohmann::json::array();
    for (const acm::Conversation& c : conversations) {
        nlohmann::json questions = nlohmann::json::array();
        nlohmann::json answers = nlohmann::json::array();
        for (const acm::Turn& t : c.turns) {
            questions.push_back({{"turn_id", t.index}, {"input_text", t.question}});
            answers.push_back({{"turn_id", t.index}, {"input_text", t.answer}});
        }
        data.push_back({{"id", c.id},
                        {"story", c.base_passage},
                        {"questions", std::move(questions)},
                        {"answers", std::move(answers)}});
    }
    return nlohmann::json{{"data", std::move(data)}};
}

inline void write_coqa_file(const std::string& path,
                            const std::vector<acm::Conversation>& conversations) {
    std::ofstream out(path);
    out << coqa_json(conversations).dump(2) << "\n";
}

} // namespace fixtures
