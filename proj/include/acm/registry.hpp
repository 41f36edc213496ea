#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "acm/config.hpp"
#include "acm/engine.hpp"
#include "acm/entity_extractor.hpp"
#include "acm/errors.hpp"
#include "acm/http_backends.hpp"
#include "acm/qa.hpp"
#include "acm/summarizer.hpp"
#include "acm/tokenizer.hpp"

namespace acm {

/// Name-keyed backend factories. Built-ins are seeded once; deployments
/// register model-matched backends alongside them. Names must be unique per
/// kind.
class BackendRegistry {
public:
    template <typename T>
    using Factory = std::function<std::shared_ptr<T>(const Config&)>;

    static BackendRegistry& global() {
        static BackendRegistry registry = make_default();
        return registry;
    }

    static BackendRegistry make_default() {
        BackendRegistry r;
        r.register_tokenizer({"reference-ws", "whitespace/punctuation reference tokenizer"},
                             [](const Config&) { return std::make_shared<ReferenceTokenizer>(); });
        r.register_summarizer(
            {"reference-extractive", "frequency-scored extractive summarizer"},
            [](const Config& cfg) {
                return std::make_shared<ExtractiveSummarizer>(
                    global().make_tokenizer(cfg.tokenizer_name, cfg));
            });
        r.register_summarizer(
            {"remote-http", "remote summarizer over JSON/HTTP"}, [](const Config& cfg) {
                HttpOptions opt{cfg.summarizer_endpoint, cfg.qa_timeout_s, cfg.qa_retries,
                                cfg.qa_backoff_ms, cfg.qa_max_inflight};
                return std::make_shared<HttpSummarizer>(
                    opt, global().make_tokenizer(cfg.tokenizer_name, cfg));
            });
        r.register_extractor({"reference-rules", "rule-based reference NER"},
                             [](const Config&) { return std::make_shared<RuleBasedExtractor>(); });
        r.register_extractor({"remote-http", "remote NER over JSON/HTTP"}, [](const Config& cfg) {
            HttpOptions opt{cfg.extractor_endpoint, cfg.qa_timeout_s, cfg.qa_retries,
                            cfg.qa_backoff_ms, cfg.qa_max_inflight};
            return std::make_shared<HttpEntityExtractor>(opt);
        });
        r.register_qa({"stub-overlap", "deterministic overlap-matching stub"},
                      [](const Config&) { return std::make_shared<StubOverlapQa>(); });
        r.register_qa({"remote-http", "remote QA model over JSON/HTTP"}, [](const Config& cfg) {
            HttpOptions opt{cfg.qa_endpoint, cfg.qa_timeout_s, cfg.qa_retries, cfg.qa_backoff_ms,
                            cfg.qa_max_inflight};
            return std::make_shared<HttpQaBackend>(opt);
        });
        return r;
    }

    void register_tokenizer(BackendSpec spec, Factory<Tokenizer> factory) {
        add(tokenizers_, std::move(spec), std::move(factory), "tokenizer");
    }
    void register_summarizer(BackendSpec spec, Factory<Summarizer> factory) {
        add(summarizers_, std::move(spec), std::move(factory), "summarizer");
    }
    void register_extractor(BackendSpec spec, Factory<EntityExtractor> factory) {
        add(extractors_, std::move(spec), std::move(factory), "entity extractor");
    }
    void register_qa(BackendSpec spec, Factory<QaBackend> factory) {
        add(qa_, std::move(spec), std::move(factory), "qa backend");
    }

    std::shared_ptr<Tokenizer> make_tokenizer(const std::string& name, const Config& cfg) const {
        return make(tokenizers_, name, cfg, "tokenizer");
    }
    std::shared_ptr<Summarizer> make_summarizer(const std::string& name, const Config& cfg) const {
        return make(summarizers_, name, cfg, "summarizer");
    }
    std::shared_ptr<EntityExtractor> make_extractor(const std::string& name,
                                                    const Config& cfg) const {
        return make(extractors_, name, cfg, "entity extractor");
    }
    std::shared_ptr<QaBackend> make_qa(const std::string& name, const Config& cfg) const {
        return make(qa_, name, cfg, "qa backend");
    }

    std::vector<BackendSpec> tokenizer_specs() const { return specs(tokenizers_); }
    std::vector<BackendSpec> summarizer_specs() const { return specs(summarizers_); }
    std::vector<BackendSpec> extractor_specs() const { return specs(extractors_); }
    std::vector<BackendSpec> qa_specs() const { return specs(qa_); }

private:
    template <typename T>
    struct Entry {
        BackendSpec spec;
        Factory<T> factory;
    };

    template <typename T>
    static void add(std::map<std::string, Entry<T>>& into, BackendSpec spec, Factory<T> factory,
                    const char* kind) {
        if (into.count(spec.name)) {
            throw ValidationError(std::string(kind) + " '" + spec.name + "' is already registered");
        }
        std::string name = spec.name;
        into.emplace(std::move(name), Entry<T>{std::move(spec), std::move(factory)});
    }

    template <typename T>
    static std::shared_ptr<T> make(const std::map<std::string, Entry<T>>& from,
                                   const std::string& name, const Config& cfg, const char* kind) {
        auto it = from.find(name);
        if (it == from.end()) {
            throw ValidationError(std::string("unknown ") + kind + " '" + name + "'");
        }
        return it->second.factory(cfg);
    }

    template <typename T>
    static std::vector<BackendSpec> specs(const std::map<std::string, Entry<T>>& from) {
        std::vector<BackendSpec> out;
        for (const auto& [name, entry] : from) out.push_back(entry.spec);
        return out;
    }

    std::map<std::string, Entry<Tokenizer>> tokenizers_;
    std::map<std::string, Entry<Summarizer>> summarizers_;
    std::map<std::string, Entry<EntityExtractor>> extractors_;
    std::map<std::string, Entry<QaBackend>> qa_;
};

inline Backends build_backends(const Config& cfg) {
    const BackendRegistry& r = BackendRegistry::global();
    Backends b;
    b.tokenizer = r.make_tokenizer(cfg.tokenizer_name, cfg);
    b.summarizer = r.make_summarizer(cfg.summarizer_name, cfg);
    b.extractor = r.make_extractor(cfg.extractor_name, cfg);
    b.qa = r.make_qa(cfg.qa_name, cfg);
    return b;
}

} // namespace acm
