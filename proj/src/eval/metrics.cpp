#include "raft/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "raft/core/error.hpp"

namespace raft {

namespace {

void require_scores(const std::vector<double>& human, const std::vector<double>& machine) {
    if (human.empty() || machine.empty())
        raise(ErrorKind::validation, "score lists must be non-empty");
}

}  // namespace

double auroc(const std::vector<double>& human_scores, const std::vector<double>& machine_scores) {
    require_scores(human_scores, machine_scores);

    // merge-sort both lists once and count, per machine score, how many
    // human scores lie below it (wins) or tie; half-integer wins are kept
    // exact by accumulating in units of 1/2
    std::vector<double> human = human_scores;
    std::sort(human.begin(), human.end());

    double twice_wins = 0.0;
    for (double m : machine_scores) {
        auto below = std::lower_bound(human.begin(), human.end(), m) - human.begin();
        auto upto = std::upper_bound(human.begin(), human.end(), m) - human.begin();
        twice_wins += 2.0 * static_cast<double>(below) + static_cast<double>(upto - below);
    }
    return twice_wins /
           (2.0 * static_cast<double>(human.size()) * static_cast<double>(machine_scores.size()));
}

double tpr_at_fpr(const std::vector<double>& human_scores,
                  const std::vector<double>& machine_scores, double fpr) {
    require_scores(human_scores, machine_scores);
    if (!(fpr > 0.0 && fpr < 1.0)) raise(ErrorKind::validation, "fpr must be in (0,1)");

    std::vector<double> human = human_scores;
    std::sort(human.begin(), human.end());
    const double n_human = static_cast<double>(human.size());

    // candidate thresholds: each distinct human score, plus a value just
    // above the maximum (classifying every human negative)
    double threshold = std::nextafter(human.back(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < human.size(); ++i) {
        if (i > 0 && human[i] == human[i - 1]) continue;
        double at_or_above = n_human - static_cast<double>(i);
        if (at_or_above / n_human <= fpr) {
            threshold = human[i];
            break;
        }
    }

    std::size_t positives = 0;
    for (double m : machine_scores)
        if (m >= threshold) ++positives;
    return static_cast<double>(positives) / static_cast<double>(machine_scores.size());
}

std::vector<RocPoint> roc_points(const std::vector<double>& human_scores,
                                 const std::vector<double>& machine_scores) {
    require_scores(human_scores, machine_scores);

    std::vector<double> thresholds;
    thresholds.reserve(human_scores.size() + machine_scores.size());
    thresholds.insert(thresholds.end(), human_scores.begin(), human_scores.end());
    thresholds.insert(thresholds.end(), machine_scores.begin(), machine_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<double> human = human_scores;
    std::vector<double> machine = machine_scores;
    std::sort(human.begin(), human.end());
    std::sort(machine.begin(), machine.end());
    auto frac_at_or_above = [](const std::vector<double>& sorted, double threshold) {
        auto idx = std::lower_bound(sorted.begin(), sorted.end(), threshold) - sorted.begin();
        return static_cast<double>(sorted.size() - static_cast<std::size_t>(idx)) /
               static_cast<double>(sorted.size());
    };

    std::vector<RocPoint> points;
    points.push_back({0.0, 0.0});
    for (double threshold : thresholds)
        points.push_back({frac_at_or_above(human, threshold), frac_at_or_above(machine, threshold)});
    points.push_back({1.0, 1.0});
    std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.fpr != b.fpr) return a.fpr < b.fpr;
        return a.tpr < b.tpr;
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const RocPoint& a, const RocPoint& b) {
                                 return a.fpr == b.fpr && a.tpr == b.tpr;
                             }),
                 points.end());
    return points;
}

double trapezoid_area(const std::vector<RocPoint>& points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
    return area;
}

double perplexity(const std::string& text, const TokenScorer& scorer) {
    auto tokens = scorer.score_tokens(text);
    if (tokens.empty()) raise(ErrorKind::validation, "text has no scoreable tokens");
    double total = 0.0;
    for (const auto& t : tokens) total += t.log_prob;
    return std::exp(-total / static_cast<double>(tokens.size()));
}

double semantic_similarity(const std::string& a, const std::string& b,
                           const TextEmbedder& embedder) {
    if (embedder.dimension() == 0)
        raise(ErrorKind::validation, "embedder has zero dimension");
    std::vector<double> va = embedder.embed(a);
    std::vector<double> vb = embedder.embed(b);
    if (va.size() != vb.size())
        raise(ErrorKind::backend, "embedder returned inconsistent dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        dot += va[i] * vb[i];
        na += va[i] * va[i];
        nb += vb[i] * vb[i];
    }
    if (na == 0.0 || nb == 0.0)
        raise(ErrorKind::validation, "similarity undefined for a zero embedding");
    double value = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(value, -1.0, 1.0);
}

double median(std::vector<double> values) {
    if (values.empty()) raise(ErrorKind::validation, "median of empty list");
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

}  // namespace raft
