#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "raft/attack/attack.hpp"
#include "raft/backends/contracts.hpp"
#include "raft/backends/ngram.hpp"
#include "raft/backends/wordvec.hpp"
#include "raft/core/types.hpp"
#include "raft/detectors/detectors.hpp"
#include "raft/substitution/candidates.hpp"

namespace raft {

/// One backend slot: which implementation to use and where to find it.
struct BackendBinding {
    std::string kind;         // e.g. "ngram", "remote", "stub", "lexicon", "wordvec", "identity"
    std::string path;         // model/lexicon/vector file for local kinds
    std::string endpoint;     // base URL for remote kinds
    std::string api_key_env;  // env var holding the credential; value is never stored
    nlohmann::json extra;     // kind-specific settings
};

struct ExternalDetectorConfig {
    std::string name;
    std::string kind;  // "subprocess" or "endpoint"
    std::vector<std::string> command;
    std::string endpoint;
    bool higher_is_machine = true;
};

struct RunConfig {
    std::string command;
    std::string dataset_path;
    std::string records_path;  // input records (evaluate, transfer, export-adv)
    std::string output_path;   // artifact directory or output file
    std::string detector = "log-rank";
    std::string ranker = "next-token";
    std::vector<std::string> transfer_detectors;
    std::vector<double> sweep_k;
    AttackConfig attack;
    int worker_count = 1;
    bool record_timing = true;      // off: zeroed timing for byte-stable artifacts
    bool include_unattacked = false;  // export-adv
    int detectgpt_n = 20;
    double detectgpt_mask_fraction = 0.15;
    int detectgpt_span_words = 2;
    int fast_detectgpt_samples = 1000;

    BackendBinding scorer;
    BackendBinding chat;
    BackendBinding embedder;
    BackendBinding tagger;
    BackendBinding infiller;
    BackendBinding wordvec;
    std::vector<ExternalDetectorConfig> external_detectors;
};

/// Reads a JSON config file into a RunConfig (command and paths may be
/// overridden by flags afterwards).
RunConfig load_run_config(const std::string& path);

nlohmann::json run_config_to_json(const RunConfig& config);

/// Everything constructed from the bindings. Slots a command does not
/// need stay null.
struct BackendSet {
    std::shared_ptr<TokenScorer> scorer;
    std::shared_ptr<ChatGenerator> chat;
    std::shared_ptr<const TextEmbedder> embedder;
    std::shared_ptr<const PosTagger> tagger;
    std::shared_ptr<const MaskInfiller> infiller;
    std::shared_ptr<const DenseWordVectors> word_vectors;
    std::shared_ptr<const MaskableClassifier> classifier;
    std::shared_ptr<const NgramLanguageModel> ngram_model;  // kept for sharing
    std::map<std::string, std::shared_ptr<const Detector>> detectors;
    std::unique_ptr<CandidateGenerator> generator;
    RankerBinding ranker;
};

/// Builds the backends a command requires; unknown kinds or missing
/// bindings raise config errors before any call is made.
BackendSet build_backends(const RunConfig& config);

}  // namespace raft
