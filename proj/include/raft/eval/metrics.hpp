#pragma once

#include <string>
#include <utility>
#include <vector>

#include "raft/backends/contracts.hpp"

namespace raft {

/// Exact AUROC: P(machine > human) + 0.5 * P(tie), computed by rank-sum
/// in O(n log n). Scores are oriented higher = machine.
double auroc(const std::vector<double>& human_scores, const std::vector<double>& machine_scores);

/// True-positive rate at the most permissive threshold that keeps the
/// human false-positive rate at or below `fpr`. "Positive" means
/// score >= threshold; the threshold is the smallest such value, taken
/// from the human scores (or just above the maximum when even that is
/// too permissive).
double tpr_at_fpr(const std::vector<double>& human_scores,
                  const std::vector<double>& machine_scores, double fpr);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// One point per distinct threshold plus the (0,0) and (1,1) endpoints,
/// sorted by fpr. Trapezoidal area over these points equals auroc().
std::vector<RocPoint> roc_points(const std::vector<double>& human_scores,
                                 const std::vector<double>& machine_scores);

double trapezoid_area(const std::vector<RocPoint>& points);

/// exp(-mean token log-probability) under the scorer.
double perplexity(const std::string& text, const TokenScorer& scorer);

/// Cosine similarity of the two texts' embeddings, in [-1, 1].
double semantic_similarity(const std::string& a, const std::string& b,
                           const TextEmbedder& embedder);

double median(std::vector<double> values);

}  // namespace raft
