#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "raft/attack/attack.hpp"
#include "raft/core/types.hpp"
#include "raft/detectors/detectors.hpp"
#include "raft/eval/metrics.hpp"

namespace raft {

struct PerplexityStats {
    double median = 0.0;
    double mean = 0.0;
};

struct RuntimeStats {
    double mean_seconds_per_sample = 0.0;
    double mean_seconds_per_word_replaced = 0.0;
};

/// One detector x attack cell of the results table.
struct EvalReport {
    std::string detector;
    std::string attack;  // "unattacked" or the ranker/generator description
    double auroc = 0.0;
    double tpr_at_5fpr = 0.0;
    PerplexityStats perplexity_attacked;
    PerplexityStats perplexity_unattacked;
    std::optional<double> cosine_similarity_mean;
    std::size_t n_samples = 0;
    RuntimeStats runtime;
};

struct SweepRow {
    double k = 0.0;
    double auroc_attacked = 0.0;
    double perplexity_median_attacked = 0.0;
};

struct TransferRow {
    std::string optimized_against;
    std::string scored_by;
    double auroc_attacked = 0.0;
};

/// Everything an experiment needs, already constructed. The detector
/// registry maps names to instances; spec names are resolved against it
/// before any backend call.
struct ExperimentEnv {
    std::map<std::string, std::shared_ptr<const Detector>> detectors;
    RankerBinding ranker;
    CandidateGenerator* generator = nullptr;
    const PosTagger* tagger = nullptr;
    std::shared_ptr<const TokenScorer> perplexity_scorer;  // optional
    std::shared_ptr<const TextEmbedder> embedder;          // optional
};

struct ExperimentSpec {
    std::string detector;                         // attack target
    std::vector<std::string> transfer_detectors;  // scored on the main run's records
    std::vector<double> sweep_k;                  // extra masking rates beyond config.mask_rate
    AttackConfig config;
    int worker_count = 1;
    std::string output_dir;      // artifacts written here when non-empty
    bool record_timing = true;   // off: zero elapsed fields so artifacts are byte-stable
    nlohmann::json run_snapshot;  // embedded in the report artifact
};

struct ExperimentResult {
    EvalReport unattacked;
    EvalReport attacked;
    std::vector<SweepRow> sweep;
    std::vector<TransferRow> transfer;
    BatchResult batch;                        // main-run records
    std::vector<double> human_scores;         // target detector on human texts
    std::vector<double> machine_scores;       // target detector on clean machine texts
    std::vector<double> attacked_scores;      // target detector after attack
    std::vector<std::string> artifact_paths;
};

/// Drives attack_dataset and the metrics for one experiment: the main
/// before/after run, an optional masking sweep, transfer scoring of the
/// perturbed texts under other detectors, and plot-data emission
/// (histogram and ROC rows as structured files).
ExperimentResult run_experiment(const std::vector<TextSample>& samples,
                                const ExperimentSpec& spec, ExperimentEnv& env);

/// Writes (text, label) training rows: human texts labeled human and
/// perturbed texts labeled machine, optionally also the unattacked
/// machine texts. Rows are shuffled deterministically by seed. Records
/// and samples must match one-to-one by id.
void export_adversarial(const std::vector<AttackRecord>& records,
                        const std::vector<TextSample>& clean_samples, const std::string& path,
                        bool include_unattacked = false, std::uint64_t seed = 0);

std::string format_report_line(const EvalReport& report);

}  // namespace raft
