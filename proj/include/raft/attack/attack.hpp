#pragma once

#include <functional>
#include <string>
#include <vector>

#include "raft/core/types.hpp"
#include "raft/detectors/detectors.hpp"
#include "raft/ranking/ranking.hpp"
#include "raft/substitution/candidates.hpp"

namespace raft {

/// Raised when the detector fails mid-attack; carries the trace built so
/// far.
class AttackAborted : public Error {
public:
    AttackAborted(std::string message, AttackRecord partial)
        : Error(ErrorKind::detector, std::move(message)), partial_(std::move(partial)) {}
    const AttackRecord& partial() const { return partial_; }

private:
    AttackRecord partial_;
};

/// Greedy constrained substitution against a detector. Selected words are
/// processed in importance order; for each, the detector is evaluated on
/// the current text with every POS-valid candidate substituted, and the
/// argmin over {original} + candidates is adopted (the original wins
/// ties, so in greedy mode the score trace never increases). In random
/// selection mode a seeded-random valid candidate is adopted without
/// consulting the detector. Words whose candidate set comes back empty
/// consume no budget. Stops early once the score reaches the configured
/// threshold, when one is set.
AttackRecord raft_attack(const WordSequence& seq, const Detector& detector,
                         const ImportanceRanking& ranking, CandidateGenerator& generator,
                         const PosTagger* tagger, const AttackConfig& config,
                         const std::string& sample_id = "", const std::string& ranker_name = "");

struct RankerBinding {
    std::string name;
    std::function<ImportanceRanking(const WordSequence&)> rank;
};

struct BatchFailure {
    std::string sample_id;
    std::string message;
};

struct BatchResult {
    std::vector<AttackRecord> records;
    std::vector<BatchFailure> failures;
};

/// Attacks every machine text in the dataset. Per-sample failures are
/// isolated and reported; more than 50% failures aborts the batch.
/// Samples are independent, so `worker_count` > 1 runs them on a thread
/// pool (backends must tolerate concurrent calls).
BatchResult attack_dataset(const std::vector<TextSample>& samples, const AttackConfig& config,
                           const Detector& detector, const RankerBinding& ranker,
                           CandidateGenerator& generator, const PosTagger* tagger,
                           int worker_count = 1);

}  // namespace raft
