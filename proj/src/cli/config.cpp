#include "raft/cli/config.hpp"

#include <fstream>

#include "raft/backends/classifier.hpp"
#include "raft/backends/remote.hpp"
#include "raft/backends/stubs.hpp"
#include "raft/backends/tagger.hpp"
#include "raft/core/dataset.hpp"

namespace raft {

using nlohmann::json;

namespace {

BackendBinding binding_from_json(const json& j) {
    BackendBinding binding;
    binding.kind = j.value("kind", std::string{});
    binding.path = j.value("path", std::string{});
    binding.endpoint = j.value("endpoint", std::string{});
    binding.api_key_env = j.value("api_key_env", std::string{});
    if (j.contains("extra")) binding.extra = j["extra"];
    return binding;
}

json binding_to_json(const BackendBinding& binding) {
    json j{{"kind", binding.kind}};
    if (!binding.path.empty()) j["path"] = binding.path;
    if (!binding.endpoint.empty()) j["endpoint"] = binding.endpoint;
    if (!binding.api_key_env.empty()) j["api_key_env"] = binding.api_key_env;
    if (!binding.extra.is_null()) j["extra"] = binding.extra;
    return j;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) raise(ErrorKind::config, "config file is not valid JSON: " + path);

    RunConfig config;
    config.command = j.value("command", std::string{});
    config.dataset_path = j.value("dataset", std::string{});
    config.records_path = j.value("records", std::string{});
    config.output_path = j.value("output", std::string{});
    config.detector = j.value("detector", config.detector);
    config.ranker = j.value("ranker", config.ranker);
    if (j.contains("transfer_detectors"))
        config.transfer_detectors = j["transfer_detectors"].get<std::vector<std::string>>();
    if (j.contains("sweep_k")) config.sweep_k = j["sweep_k"].get<std::vector<double>>();
    if (j.contains("attack")) config.attack = j["attack"].get<AttackConfig>();
    config.worker_count = j.value("workers", config.worker_count);
    config.record_timing = j.value("record_timing", config.record_timing);
    config.include_unattacked = j.value("include_unattacked", config.include_unattacked);
    config.detectgpt_n = j.value("detectgpt_n", config.detectgpt_n);
    config.detectgpt_mask_fraction =
        j.value("detectgpt_mask_fraction", config.detectgpt_mask_fraction);
    config.detectgpt_span_words = j.value("detectgpt_span_words", config.detectgpt_span_words);
    config.fast_detectgpt_samples =
        j.value("fast_detectgpt_samples", config.fast_detectgpt_samples);

    if (j.contains("backends")) {
        const json& b = j["backends"];
        if (b.contains("scorer")) config.scorer = binding_from_json(b["scorer"]);
        if (b.contains("chat")) config.chat = binding_from_json(b["chat"]);
        if (b.contains("embedder")) config.embedder = binding_from_json(b["embedder"]);
        if (b.contains("tagger")) config.tagger = binding_from_json(b["tagger"]);
        if (b.contains("infiller")) config.infiller = binding_from_json(b["infiller"]);
        if (b.contains("wordvec")) config.wordvec = binding_from_json(b["wordvec"]);
    }
    if (j.contains("external_detectors")) {
        for (const json& d : j["external_detectors"]) {
            ExternalDetectorConfig external;
            external.name = d.at("name").get<std::string>();
            external.kind = d.value("kind", std::string("subprocess"));
            if (d.contains("command"))
                external.command = d["command"].get<std::vector<std::string>>();
            external.endpoint = d.value("endpoint", std::string{});
            external.higher_is_machine = d.value("higher_is_machine", true);
            config.external_detectors.push_back(std::move(external));
        }
    }
    return config;
}

json run_config_to_json(const RunConfig& config) {
    json backends;
    if (!config.scorer.kind.empty()) backends["scorer"] = binding_to_json(config.scorer);
    if (!config.chat.kind.empty()) backends["chat"] = binding_to_json(config.chat);
    if (!config.embedder.kind.empty()) backends["embedder"] = binding_to_json(config.embedder);
    if (!config.tagger.kind.empty()) backends["tagger"] = binding_to_json(config.tagger);
    if (!config.infiller.kind.empty()) backends["infiller"] = binding_to_json(config.infiller);
    if (!config.wordvec.kind.empty()) backends["wordvec"] = binding_to_json(config.wordvec);

    json j{{"command", config.command},
           {"dataset", config.dataset_path},
           {"output", config.output_path},
           {"detector", config.detector},
           {"ranker", config.ranker},
           {"attack", config.attack},
           {"workers", config.worker_count},
           {"record_timing", config.record_timing},
           {"backends", backends}};
    if (!config.records_path.empty()) j["records"] = config.records_path;
    if (!config.transfer_detectors.empty()) j["transfer_detectors"] = config.transfer_detectors;
    if (!config.sweep_k.empty()) j["sweep_k"] = config.sweep_k;
    if (!config.external_detectors.empty()) {
        json externals = json::array();
        for (const auto& d : config.external_detectors) {
            json e{{"name", d.name},
                   {"kind", d.kind},
                   {"higher_is_machine", d.higher_is_machine}};
            if (!d.command.empty()) e["command"] = d.command;
            if (!d.endpoint.empty()) e["endpoint"] = d.endpoint;
            externals.push_back(std::move(e));
        }
        j["external_detectors"] = externals;
    }
    return j;
}

namespace {

std::shared_ptr<TokenScorer> build_scorer(const RunConfig& config,
                                          std::shared_ptr<const NgramLanguageModel>& model_out) {
    const BackendBinding& binding = config.scorer;
    if (binding.kind.empty()) return nullptr;
    if (binding.kind == "ngram") {
        if (binding.path.empty()) raise(ErrorKind::config, "ngram scorer needs a path");
        auto model = std::make_shared<NgramLanguageModel>(NgramLanguageModel::load(binding.path));
        model_out = model;
        return std::make_shared<NgramScorer>(model, config.attack.seed);
    }
    if (binding.kind == "remote") {
        if (binding.endpoint.empty()) raise(ErrorKind::config, "remote scorer needs an endpoint");
        return std::make_shared<RemoteScorer>(binding.endpoint, binding.api_key_env);
    }
    if (binding.kind == "stub") {
        std::map<std::string, double> probs;
        if (binding.extra.contains("probs"))
            probs = binding.extra["probs"].get<std::map<std::string, double>>();
        std::size_t vocab = binding.extra.value("vocab_size", probs.size());
        return std::make_shared<StubScorer>(std::move(probs), vocab, config.attack.seed);
    }
    raise(ErrorKind::config, "unknown scorer kind: " + binding.kind);
}

std::shared_ptr<ChatGenerator> build_chat(const RunConfig& config) {
    const BackendBinding& binding = config.chat;
    if (binding.kind.empty()) return nullptr;
    if (binding.kind == "remote") {
        if (binding.endpoint.empty()) raise(ErrorKind::config, "remote chat needs an endpoint");
        return std::make_shared<RemoteChat>(binding.endpoint, RetryPolicy{}, binding.api_key_env);
    }
    if (binding.kind == "stub") {
        std::string response = binding.extra.value("response", std::string{});
        return std::make_shared<ScriptedChatGenerator>(
            [response](const std::string&) { return response; });
    }
    raise(ErrorKind::config, "unknown chat kind: " + binding.kind);
}

}  // namespace

BackendSet build_backends(const RunConfig& config) {
    BackendSet set;

    set.scorer = build_scorer(config, set.ngram_model);
    set.chat = build_chat(config);

    if (!config.wordvec.kind.empty()) {
        if (config.wordvec.kind != "file" && config.wordvec.kind != "wordvec")
            raise(ErrorKind::config, "unknown wordvec kind: " + config.wordvec.kind);
        if (config.wordvec.path.empty()) raise(ErrorKind::config, "wordvec needs a path");
        set.word_vectors = std::make_shared<DenseWordVectors>(
            DenseWordVectors::load_text(config.wordvec.path));
    }

    if (!config.tagger.kind.empty()) {
        if (config.tagger.kind != "lexicon")
            raise(ErrorKind::config, "unknown tagger kind: " + config.tagger.kind);
        if (config.tagger.path.empty()) raise(ErrorKind::config, "lexicon tagger needs a path");
        set.tagger = std::make_shared<LexiconPosTagger>(LexiconPosTagger::load(config.tagger.path));
    }

    if (!config.embedder.kind.empty()) {
        if (config.embedder.kind == "wordvec") {
            if (!set.word_vectors)
                raise(ErrorKind::config, "wordvec embedder needs the wordvec binding");
            set.embedder = std::make_shared<WordVectorEmbedder>(set.word_vectors);
        } else if (config.embedder.kind == "stub") {
            set.embedder = std::make_shared<StubEmbedder>(
                config.embedder.extra.value("dimension", std::size_t{16}));
        } else {
            raise(ErrorKind::config, "unknown embedder kind: " + config.embedder.kind);
        }
    }

    if (!config.infiller.kind.empty()) {
        if (config.infiller.kind == "identity") {
            set.infiller = std::make_shared<IdentityInfiller>();
        } else if (config.infiller.kind == "ngram") {
            std::shared_ptr<const NgramLanguageModel> model = set.ngram_model;
            if (!model && !config.infiller.path.empty())
                model = std::make_shared<NgramLanguageModel>(
                    NgramLanguageModel::load(config.infiller.path));
            if (!model)
                raise(ErrorKind::config, "ngram infiller needs an ngram scorer or its own path");
            set.infiller = std::make_shared<NgramInfiller>(model, config.attack.seed);
        } else {
            raise(ErrorKind::config, "unknown infiller kind: " + config.infiller.kind);
        }
    }

    if (set.scorer) set.classifier = std::make_shared<ScorerBackedClassifier>(set.scorer);

    // detector registry
    if (set.scorer) {
        set.detectors.emplace("log-likelihood",
                              std::make_shared<LogLikelihoodDetector>(set.scorer));
        set.detectors.emplace("log-rank", std::make_shared<LogRankDetector>(set.scorer));
        if (set.infiller) {
            DetectGptOptions options;
            options.mask_fraction = config.detectgpt_mask_fraction;
            options.span_words = static_cast<std::size_t>(config.detectgpt_span_words);
            options.seed = config.attack.seed;
            set.detectors.emplace("detectgpt",
                                  std::make_shared<DetectGptDetector>(
                                      set.scorer, set.infiller, config.detectgpt_n, options));
        }
        FastDetectGptOptions fast_options;
        fast_options.seed = config.attack.seed;
        set.detectors.emplace("fast-detectgpt",
                              std::make_shared<FastDetectGptDetector>(
                                  set.scorer, config.fast_detectgpt_samples, fast_options));
    }
    if (set.classifier)
        set.detectors.emplace("proxy-classifier",
                              std::make_shared<ClassifierDetector>(set.classifier));
    for (const auto& external : config.external_detectors) {
        if (external.kind == "subprocess") {
            if (external.command.empty())
                raise(ErrorKind::config, "subprocess detector needs a command: " + external.name);
            set.detectors.emplace(external.name,
                                  std::make_shared<SubprocessDetector>(
                                      external.command, external.higher_is_machine, external.name));
        } else if (external.kind == "endpoint") {
            if (external.endpoint.empty())
                raise(ErrorKind::config, "endpoint detector needs a URL: " + external.name);
            set.detectors.emplace(external.name,
                                  std::make_shared<EndpointDetector>(
                                      external.endpoint, external.higher_is_machine, external.name));
        } else {
            raise(ErrorKind::config, "unknown external detector kind: " + external.kind);
        }
    }

    // candidate generator
    if (config.attack.generator == GeneratorKind::embedding) {
        if (set.word_vectors)
            set.generator = std::make_unique<EmbeddingCandidateGenerator>(set.word_vectors);
    } else if (set.chat) {
        set.generator = std::make_unique<ChatCandidateGenerator>(set.chat);
    }

    // ranker binding
    if (config.ranker == "next-token") {
        if (set.scorer) {
            auto scorer = set.scorer;
            set.ranker = {"next-token", [scorer](const WordSequence& seq) {
                              return rank_next_token(seq, *scorer);
                          }};
        }
    } else if (config.ranker == "mask-ablation") {
        if (set.classifier) {
            auto classifier = set.classifier;
            set.ranker = {"mask-ablation", [classifier](const WordSequence& seq) {
                              return rank_mask_ablation(seq, *classifier);
                          }};
        }
    } else if (config.ranker == "random") {
        auto seed = config.attack.seed;
        set.ranker = {"random",
                      [seed](const WordSequence& seq) { return rank_random(seq, seed); }};
    } else {
        raise(ErrorKind::config, "unknown ranker name: " + config.ranker);
    }

    return set;
}

}  // namespace raft
