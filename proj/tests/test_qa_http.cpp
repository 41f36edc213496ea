#include <doctest.h>

#include <atomic>
#include <chrono>
#include <random>
#include <thread>
#include <vector>

#include <httplib.h>

#include "acm/http_backends.hpp"
#include "acm/qa.hpp"
#include "fixtures.hpp"

using namespace acm;

TEST_CASE("qa stub returns the max-overlap sentence") {
    StubOverlapQa stub;
    std::string context = "Bob stayed home. Alice went to Paris. It rained all day.";
    // Non-stopword question tokens {alice, go}: only the second sentence
    // overlaps (alice), so it wins despite coming after Bob's.
    CHECK(stub.answer(context, "Where did Alice go?") == "Alice went to Paris.");
}

TEST_CASE("qa stub breaks ties toward the earliest sentence") {
    StubOverlapQa stub;
    std::string context = "the alice file sits upstairs. the alice key sits downstairs.";
    CHECK(stub.answer(context, "alice?") == "the alice file sits upstairs.");
}

TEST_CASE("qa stub emits the no-answer marker on zero overlap") {
    StubOverlapQa stub;
    CHECK(stub.answer("completely unrelated text.", "zebra quantum?") ==
          StubOverlapQa::kNoAnswerMarker);
    CHECK_THROWS_AS(stub.answer("", "anything"), ValidationError);
}

TEST_CASE("qa stub never answers with the restated question") {
    StubOverlapQa stub;
    // Engine-rendered contexts end with the question segment; the only
    // overlapping sentence here is that restatement, so the stub must fall
    // back to the marker instead of echoing it.
    std::string context = "Passage: nothing relevant here.\n\nQuestion: where is the jade statue";
    CHECK(stub.answer(context, "where is the jade statue") == StubOverlapQa::kNoAnswerMarker);
    // A history line that merely contains the question is still a valid answer.
    std::string with_history = context + "\n\nQ: where is the jade statue A: in the vault";
    CHECK(stub.answer(with_history, "where is the jade statue") ==
          "Q: where is the jade statue A: in the vault");
}

TEST_CASE("qa stub is deterministic and extractive") {
    StubOverlapQa stub;
    std::mt19937 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        std::string context = fixtures::random_prose(rng, 40);
        std::string question = fixtures::random_prose(rng, 6);
        std::string answer = stub.answer(context, question);
        CHECK(answer == stub.answer(context, question));
        if (answer != StubOverlapQa::kNoAnswerMarker) {
            bool found = false;
            for (const std::string& sentence : text::split_sentences(context)) {
                if (sentence == answer) found = true;
            }
            CHECK(found);
        }
    }
}

namespace {

struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestServer() = default;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port) + path;
    }
};

HttpOptions fast_options(const std::string& endpoint, int retries = 3) {
    HttpOptions opt;
    opt.endpoint = endpoint;
    opt.timeout_s = 5.0;
    opt.retries = retries;
    opt.backoff_ms = 5;
    opt.max_inflight = 4;
    return opt;
}

} // namespace

TEST_CASE("http qa adapter round-trips answers and records latency") {
    TestServer ts;
    ts.server.Post("/answer", [](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        REQUIRE(body.contains("context"));
        REQUIRE(body.contains("question"));
        res.set_content(nlohmann::json{{"answer", "canned: " + body["question"].get<std::string>()}}
                            .dump(),
                        "application/json");
    });
    ts.start();
    HttpQaBackend qa(fast_options(ts.url("/answer")));
    CHECK(qa.answer("some context", "why?") == "canned: why?");
    CHECK(qa.last_latency_ms() >= 0);
}

TEST_CASE("http qa adapter retries 5xx with backoff then succeeds") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/answer", [&](const httplib::Request&, httplib::Response& res) {
        if (hits.fetch_add(1) < 2) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"answer":"finally"})", "application/json");
    });
    ts.start();
    HttpQaBackend qa(fast_options(ts.url("/answer"), 3));
    CHECK(qa.answer("ctx", "q") == "finally");
    CHECK(hits.load() == 3);
}

TEST_CASE("http qa adapter fails after exhausting retries") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/answer", [&](const httplib::Request&, httplib::Response& res) {
        hits.fetch_add(1);
        res.status = 500;
    });
    ts.start();
    HttpQaBackend qa(fast_options(ts.url("/answer"), 1));
    CHECK_THROWS_AS(qa.answer("ctx", "q"), BackendError);
    CHECK(hits.load() == 2); // initial call + one retry
}

TEST_CASE("http qa adapter treats 4xx as permanent") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/answer", [&](const httplib::Request&, httplib::Response& res) {
        hits.fetch_add(1);
        res.status = 404;
    });
    ts.start();
    HttpQaBackend qa(fast_options(ts.url("/answer"), 3));
    CHECK_THROWS_AS(qa.answer("ctx", "q"), BackendError);
    CHECK(hits.load() == 1);
}

TEST_CASE("http qa adapter rejects malformed responses") {
    TestServer ts;
    ts.server.Post("/answer", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("not json at all", "text/plain");
    });
    ts.server.Post("/missing", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"result":"wrong field"})", "application/json");
    });
    ts.start();
    CHECK_THROWS_AS(HttpQaBackend(fast_options(ts.url("/answer"), 0)).answer("c", "q"),
                    BackendError);
    CHECK_THROWS_AS(HttpQaBackend(fast_options(ts.url("/missing"), 0)).answer("c", "q"),
                    BackendError);
}

TEST_CASE("http qa adapter reports unreachable endpoints") {
    HttpQaBackend qa(fast_options("http://127.0.0.1:9/answer", 0));
    CHECK_THROWS_AS(qa.answer("ctx", "q"), BackendError);
    CHECK_THROWS_AS(HttpQaBackend(HttpOptions{}), ValidationError);
    CHECK_THROWS_AS(HttpQaBackend(fast_options("127.0.0.1/answer")), ValidationError);
}

TEST_CASE("http adapter bounds in-flight requests") {
    TestServer ts;
    std::atomic<int> inflight{0};
    std::atomic<int> peak{0};
    ts.server.Post("/answer", [&](const httplib::Request&, httplib::Response& res) {
        int now = inflight.fetch_add(1) + 1;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
        inflight.fetch_sub(1);
        res.set_content(R"({"answer":"ok"})", "application/json");
    });
    ts.start();
    HttpOptions opt = fast_options(ts.url("/answer"), 0);
    opt.max_inflight = 2;
    HttpQaBackend qa(opt);
    std::vector<std::thread> callers;
    for (int i = 0; i < 8; ++i) {
        callers.emplace_back([&] { CHECK(qa.answer("ctx", "q") == "ok"); });
    }
    for (std::thread& t : callers) t.join();
    CHECK(peak.load() <= 2);
}

TEST_CASE("http summarizer adapter enforces the cap locally") {
    TestServer ts;
    ts.server.Post("/summarize", [](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        REQUIRE(body.contains("text"));
        REQUIRE(body.contains("max_tokens"));
        res.set_content(
            nlohmann::json{{"summary", "one two three four five six seven eight"}}.dump(),
            "application/json");
    });
    ts.start();
    auto tokenizer = std::make_shared<ReferenceTokenizer>();
    HttpSummarizer summarizer(fast_options(ts.url("/summarize")), tokenizer);
    SummaryRequest request{"", {{1, "q", "a"}}, 5};
    std::string out = summarizer.summarize(request);
    CHECK(out == "one two three four five");
    CHECK(tokenizer->count_tokens(out) == 5);
}

TEST_CASE("http entity extractor adapter maps categories") {
    TestServer ts;
    ts.server.Post("/entities", [](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        REQUIRE(body.contains("text"));
        res.set_content(nlohmann::json{{"entities",
                                        {{{"surface", "Alice"}, {"category", "person"}},
                                         {{"surface", "Paris"}, {"category", "location"}},
                                         {{"surface", "thing"}}}}}
                            .dump(),
                        "application/json");
    });
    ts.start();
    HttpEntityExtractor extractor(fast_options(ts.url("/entities")));
    std::vector<EntityItem> items = extractor.identify("whatever text", 7);
    REQUIRE(items.size() == 3);
    CHECK(items[0].category == EntityCategory::person);
    CHECK(items[1].category == EntityCategory::location);
    CHECK(items[2].category == EntityCategory::other);
    CHECK(items[0].source_turn == 7);
}
