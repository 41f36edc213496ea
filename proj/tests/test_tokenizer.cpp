#include <doctest.h>

#include <random>

#include "acm/registry.hpp"
#include "acm/text.hpp"
#include "acm/tokenizer.hpp"

using acm::ReferenceTokenizer;

TEST_CASE("reference tokenizer: empty text has no tokens") {
    ReferenceTokenizer tok;
    CHECK(tok.count_tokens("") == 0);
    CHECK(tok.count_tokens("   \n\t ") == 0);
    CHECK(tok.tokenize("").empty());
}

TEST_CASE("reference tokenizer: words plus terminal punctuation") {
    ReferenceTokenizer tok;
    CHECK(tok.count_tokens("Alice went to Paris.") == 5);
    CHECK(tok.tokenize("the cat") == std::vector<std::string>{"the", "cat"});
}

TEST_CASE("reference tokenizer: contraction suffixes stay attached") {
    ReferenceTokenizer tok;
    std::vector<std::string> expected = {"Dr", ".", "Smith", "'s", "dog"};
    CHECK(tok.tokenize("Dr. Smith's dog") == expected);
}

TEST_CASE("reference tokenizer: additivity over a space join") {
    ReferenceTokenizer tok;
    CHECK(tok.count_tokens("a b") + tok.count_tokens("c d") == tok.count_tokens("a b c d"));
    CHECK(tok.count_tokens("one, two!") + tok.count_tokens("three") ==
          tok.count_tokens("one, two! three"));
}

TEST_CASE("reference tokenizer: join/retokenize is idempotent on random ASCII") {
    ReferenceTokenizer tok;
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> len(0, 40);
    std::uniform_int_distribution<int> ch(32, 126);
    for (int trial = 0; trial < 300; ++trial) {
        std::string s;
        int l = len(rng);
        for (int i = 0; i < l; ++i) s.push_back(static_cast<char>(ch(rng)));
        std::vector<std::string> once = tok.tokenize(s);
        std::vector<std::string> twice = tok.tokenize(acm::text::join(once, " "));
        CHECK(once == twice);
    }
}

TEST_CASE("reference tokenizer: concatenation never loses tokens") {
    ReferenceTokenizer tok;
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> len(1, 12);
    auto random_text = [&] {
        std::string s;
        int l = len(rng);
        std::uniform_int_distribution<int> ch('a', 'z');
        for (int i = 0; i < l; ++i) s.push_back(static_cast<char>(ch(rng)));
        return s;
    };
    for (int trial = 0; trial < 100; ++trial) {
        std::string a = random_text(), b = random_text();
        int joined = tok.count_tokens(a + b);
        CHECK(joined >= std::max(tok.count_tokens(a), tok.count_tokens(b)));
    }
}

TEST_CASE("reference tokenizer: utf-8 runs count as single word tokens") {
    ReferenceTokenizer tok;
    CHECK(tok.count_tokens("caf\xc3\xa9 au lait") == 3);
}

TEST_CASE("sentence splitting on terminators and newlines") {
    using acm::text::split_sentences;
    CHECK(split_sentences("Alice went home. Bob stayed!") ==
          std::vector<std::string>{"Alice went home.", "Bob stayed!"});
    CHECK(split_sentences("line one\nline two") ==
          std::vector<std::string>{"line one", "line two"});
    CHECK(split_sentences("what?! really") == std::vector<std::string>{"what?!", "really"});
    CHECK(split_sentences("").empty());
}

TEST_CASE("stopword list holds exactly fifty entries") {
    CHECK(acm::text::stopwords().size() == 50);
    CHECK(acm::text::is_stopword("The"));
    CHECK_FALSE(acm::text::is_stopword("dragon"));
}

TEST_CASE("backend registry resolves names and rejects duplicates") {
    acm::BackendRegistry registry = acm::BackendRegistry::make_default();
    acm::Config cfg;
    CHECK(registry.make_tokenizer("reference-ws", cfg)->count_tokens("a b") == 2);
    CHECK_THROWS_AS(registry.make_tokenizer("bpe-48k", cfg), acm::ValidationError);
    CHECK_THROWS_AS(registry.register_tokenizer(
                        {"reference-ws", "dup"},
                        [](const acm::Config&) { return std::make_shared<ReferenceTokenizer>(); }),
                    acm::ValidationError);
    bool found = false;
    for (const acm::BackendSpec& spec : registry.qa_specs()) {
        if (spec.name == "stub-overlap") found = true;
    }
    CHECK(found);

    acm::Config unknown;
    unknown.summarizer_name = "bart-large";
    CHECK_THROWS_AS(acm::build_backends(unknown), acm::ValidationError);
}
