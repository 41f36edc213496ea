#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "acm/entity_extractor.hpp"
#include "acm/errors.hpp"
#include "acm/qa.hpp"
#include "acm/summarizer.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

struct HttpOptions {
    std::string endpoint; // e.g. http://127.0.0.1:8700/answer
    double timeout_s = 30.0;
    int retries = 3;
    int backoff_ms = 200;
    int max_inflight = 4;
};

namespace http_detail {

struct Endpoint {
    std::string base; // scheme://host:port
    std::string path; // /route
};

inline Endpoint parse_endpoint(const std::string& url) {
    if (url.empty()) throw ValidationError("remote backend requires an endpoint url");
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw ValidationError("endpoint '" + url + "' must include a scheme");
    }
    size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

} // namespace http_detail

/// JSON-over-HTTP POST with bounded concurrency and exponential-backoff
/// retries on transport failures and 5xx responses.
class HttpJsonClient {
public:
    explicit HttpJsonClient(HttpOptions options)
        : options_(std::move(options)),
          endpoint_(http_detail::parse_endpoint(options_.endpoint)),
          slots_(options_.max_inflight) {}

    nlohmann::json post(const nlohmann::json& body) {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{slots_};

        std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= options_.retries; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(options_.backoff_ms) * (1 << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }
            auto start = std::chrono::steady_clock::now();
            httplib::Client client(endpoint_.base);
            client.set_connection_timeout(std::chrono::duration<double>(options_.timeout_s));
            client.set_read_timeout(std::chrono::duration<double>(options_.timeout_s));
            client.set_write_timeout(std::chrono::duration<double>(options_.timeout_s));
            httplib::Result res = client.Post(endpoint_.path, payload, "application/json");
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
            last_latency_ms_.store(elapsed, std::memory_order_relaxed);
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "server returned status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw BackendError("endpoint '" + options_.endpoint + "' returned status " +
                                   std::to_string(res->status));
            }
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw BackendError("endpoint '" + options_.endpoint +
                                   "' returned malformed JSON: " + e.what());
            }
        }
        throw BackendError("endpoint '" + options_.endpoint + "' failed after " +
                           std::to_string(options_.retries + 1) + " attempts (" + last_error + ")");
    }

    long last_latency_ms() const { return last_latency_ms_.load(std::memory_order_relaxed); }

private:
    HttpOptions options_;
    http_detail::Endpoint endpoint_;
    std::counting_semaphore<> slots_;
    std::atomic<long> last_latency_ms_{0};
};

/// Remote QA adapter. Wire protocol:
///   request  {"context": string, "question": string}
///   response {"answer": string}
class HttpQaBackend : public QaBackend {
public:
    explicit HttpQaBackend(HttpOptions options) : client_(std::move(options)) {}

    std::string name() const override { return "remote-http"; }
    std::string description() const override { return "remote QA model over JSON/HTTP"; }

    std::string answer(const std::string& rendered_context,
                       const std::string& question) const override {
        if (rendered_context.empty()) {
            throw ValidationError("qa: rendered context must be non-empty");
        }
        nlohmann::json response =
            client_.post({{"context", rendered_context}, {"question", question}});
        if (!response.is_object() || !response.contains("answer") ||
            !response["answer"].is_string()) {
            throw BackendError("qa endpoint response missing string field 'answer'");
        }
        return response["answer"].get<std::string>();
    }

    long last_latency_ms() const { return client_.last_latency_ms(); }

private:
    mutable HttpJsonClient client_;
};

/// Remote summarizer adapter. Wire protocol:
///   request  {"text": string, "max_tokens": integer}
///   response {"summary": string}
/// The cap is enforced locally: an over-long remote summary is cut to its
/// first max_tokens tokens.
class HttpSummarizer : public Summarizer {
public:
    HttpSummarizer(HttpOptions options, std::shared_ptr<Tokenizer> tokenizer)
        : client_(std::move(options)), tokenizer_(std::move(tokenizer)) {}

    std::string name() const override { return "remote-http"; }
    std::string description() const override { return "remote summarizer over JSON/HTTP"; }

    std::string summarize(const SummaryRequest& request) const override {
        request.validate();
        std::string rendered = render_turns_for_summary(request.demoted_turns);
        std::string window = request.prior_summary.empty()
                                 ? std::move(rendered)
                                 : request.prior_summary + "\n" + rendered;
        nlohmann::json response =
            client_.post({{"text", window}, {"max_tokens", request.max_tokens}});
        if (!response.is_object() || !response.contains("summary") ||
            !response["summary"].is_string()) {
            throw BackendError("summarizer endpoint response missing string field 'summary'");
        }
        std::string summary = response["summary"].get<std::string>();
        if (tokenizer_->count_tokens(summary) > request.max_tokens) {
            summary = truncate_to_tokens(*tokenizer_, summary, request.max_tokens);
        }
        return summary;
    }

private:
    mutable HttpJsonClient client_;
    std::shared_ptr<Tokenizer> tokenizer_;
};

/// Remote entity extractor adapter. Wire protocol:
///   request  {"text": string}
///   response {"entities": [{"surface": string, "category": string}, ...]}
class HttpEntityExtractor : public EntityExtractor {
public:
    explicit HttpEntityExtractor(HttpOptions options) : client_(std::move(options)) {}

    std::string name() const override { return "remote-http"; }
    std::string description() const override { return "remote NER over JSON/HTTP"; }

    std::vector<EntityItem> identify(std::string_view input, int source_turn) const override {
        nlohmann::json response = client_.post({{"text", std::string(input)}});
        if (!response.is_object() || !response.contains("entities") ||
            !response["entities"].is_array()) {
            throw BackendError("entity endpoint response missing array field 'entities'");
        }
        std::vector<EntityItem> items;
        for (const auto& entry : response["entities"]) {
            if (!entry.is_object() || !entry.contains("surface") ||
                !entry["surface"].is_string()) {
                throw BackendError("entity endpoint returned an entry without 'surface'");
            }
            EntityItem item;
            item.surface = entry["surface"].get<std::string>();
            item.category = entry.contains("category") && entry["category"].is_string()
                                ? entity_category_from_string(entry["category"].get<std::string>())
                                : EntityCategory::other;
            item.source_turn = source_turn;
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    mutable HttpJsonClient client_;
};

} // namespace acm
