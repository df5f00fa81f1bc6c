#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "raft/backends/contracts.hpp"

namespace raft {

/// A named detector. Every detector returns a raw real score oriented so
/// that higher means more likely machine-generated; detectors whose
/// native statistic runs the other way are negated internally.
class Detector {
public:
    virtual ~Detector() = default;
    virtual double score(const std::string& text) const = 0;
    virtual std::string name() const = 0;
    virtual std::optional<double> default_threshold() const { return std::nullopt; }
    virtual bool supports_mask_ablation() const { return false; }
};

/// Mean token log-probability under the scorer.
double detect_log_likelihood(const std::string& text, const TokenScorer& scorer);

/// Negated mean log token rank: rank-1 tokens contribute 0, so the score
/// is always <= 0 and higher means more model-typical.
double detect_log_rank(const std::string& text, const TokenScorer& scorer);

struct DetectGptOptions {
    double mask_fraction = 0.15;  // fraction of words masked per variant
    std::size_t span_words = 2;
    std::uint64_t seed = 0;
};

/// Perturbation-discrepancy score: (l(x) - mean l(x~)) / std l(x~) over
/// n infilled variants, where l is mean token log-prob. The unbiased
/// standard deviation is used; a degenerate std (< 1e-8) falls back to
/// the unnormalized gap.
double detect_detectgpt(const std::string& text, const TokenScorer& scorer,
                        const MaskInfiller& infiller, int n_perturbations,
                        const DetectGptOptions& options = {});

struct FastDetectGptOptions {
    enum class Mode { automatic, sample, enumerate };
    Mode mode = Mode::automatic;  // enumerate exactly when the scorer supports it
    std::uint64_t seed = 0;
};

/// Conditional probability curvature: (l(x) - mu) / sigma where mu and
/// sigma describe the mean log-prob of token sequences resampled from
/// the scorer's conditional distributions. With an enumerable scorer the
/// moments are computed exactly (the n -> infinity limit); otherwise
/// n_samples sequences are drawn.
double detect_fast_detectgpt(const std::string& text, const TokenScorer& scorer, int n_samples,
                             const FastDetectGptOptions& options = {});

class LogLikelihoodDetector final : public Detector {
public:
    explicit LogLikelihoodDetector(std::shared_ptr<const TokenScorer> scorer)
        : scorer_(std::move(scorer)) {}
    double score(const std::string& text) const override {
        return detect_log_likelihood(text, *scorer_);
    }
    std::string name() const override { return "log-likelihood"; }

private:
    std::shared_ptr<const TokenScorer> scorer_;
};

class LogRankDetector final : public Detector {
public:
    explicit LogRankDetector(std::shared_ptr<const TokenScorer> scorer)
        : scorer_(std::move(scorer)) {}
    double score(const std::string& text) const override {
        return detect_log_rank(text, *scorer_);
    }
    std::string name() const override { return "log-rank"; }

private:
    std::shared_ptr<const TokenScorer> scorer_;
};

class DetectGptDetector final : public Detector {
public:
    DetectGptDetector(std::shared_ptr<const TokenScorer> scorer,
                      std::shared_ptr<const MaskInfiller> infiller, int n_perturbations = 20,
                      DetectGptOptions options = {})
        : scorer_(std::move(scorer)), infiller_(std::move(infiller)),
          n_perturbations_(n_perturbations), options_(options) {}
    double score(const std::string& text) const override {
        return detect_detectgpt(text, *scorer_, *infiller_, n_perturbations_, options_);
    }
    std::string name() const override { return "detectgpt"; }

private:
    std::shared_ptr<const TokenScorer> scorer_;
    std::shared_ptr<const MaskInfiller> infiller_;
    int n_perturbations_;
    DetectGptOptions options_;
};

class FastDetectGptDetector final : public Detector {
public:
    FastDetectGptDetector(std::shared_ptr<const TokenScorer> scorer, int n_samples = 1000,
                          FastDetectGptOptions options = {})
        : scorer_(std::move(scorer)), n_samples_(n_samples), options_(options) {}
    double score(const std::string& text) const override {
        return detect_fast_detectgpt(text, *scorer_, n_samples_, options_);
    }
    std::string name() const override { return "fast-detectgpt"; }

private:
    std::shared_ptr<const TokenScorer> scorer_;
    int n_samples_;
    FastDetectGptOptions options_;
};

/// Wraps a maskable proxy classifier as a detector (used as the
/// mask-ablation ranking target and as a detector in its own right).
class ClassifierDetector final : public Detector {
public:
    explicit ClassifierDetector(std::shared_ptr<const MaskableClassifier> classifier)
        : classifier_(std::move(classifier)) {}
    double score(const std::string& text) const override { return classifier_->classify(text); }
    std::string name() const override { return classifier_->name(); }
    bool supports_mask_ablation() const override { return true; }
    const MaskableClassifier& classifier() const { return *classifier_; }

private:
    std::shared_ptr<const MaskableClassifier> classifier_;
};

/// External detector run as a subprocess: the text is written to the
/// child's standard input and one real number is read from its standard
/// output. `higher_is_machine = false` declares the opposite orientation
/// and flips the sign.
class SubprocessDetector final : public Detector {
public:
    SubprocessDetector(std::vector<std::string> argv, bool higher_is_machine = true,
                       std::string display_name = "",
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));

    double score(const std::string& text) const override;
    std::string name() const override { return name_; }

private:
    std::vector<std::string> argv_;
    bool higher_is_machine_;
    std::string name_;
    std::chrono::milliseconds timeout_;
};

/// External detector served over HTTP: POST /detect with {"text": ...}
/// returns {"score": ...}.
class EndpointDetector final : public Detector {
public:
    EndpointDetector(std::string base_url, bool higher_is_machine = true,
                     std::string display_name = "",
                     std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));

    double score(const std::string& text) const override;
    std::string name() const override { return name_; }

private:
    std::string base_url_;
    bool higher_is_machine_;
    std::string name_;
    std::chrono::milliseconds timeout_;
};

}  // namespace raft
