#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <map>
#include <string>
#include <vector>

#include "raft/backends/contracts.hpp"

namespace raft {

/// Deterministic scorer over a fixed token distribution. Probabilities
/// must form a sub-distribution; leftover mass is spread uniformly over
/// the remaining `vocab_size - |spec|` synthetic tokens. The conditional
/// distribution is the same at every position, which makes expected
/// detector values computable by hand in tests.
class StubScorer final : public TokenScorer {
public:
    StubScorer(std::map<std::string, double> token_probs, std::size_t vocab_size,
               std::uint64_t seed = 0);

    std::vector<ScoredToken> score_tokens(const std::string& text) const override;
    std::vector<SampledToken> sample_alternatives(const std::string& text, std::size_t position,
                                                  std::size_t n) const override;
    std::vector<SampledToken> enumerate_alternatives(const std::string& text,
                                                     std::size_t position) const override;
    std::size_t vocab_size() const override { return vocab_size_; }
    std::string name() const override { return "stub-scorer"; }

    double probability_of(const std::string& token) const;
    double rank_of(const std::string& token) const;

private:
    std::map<std::string, double> probs_;  // ordered: fixed lexicographic tie-order
    std::size_t vocab_size_;
    std::uint64_t seed_;
    double residual_unit_ = 0.0;  // probability of each unseen synthetic token
    std::size_t n_unseen_ = 0;
};

StubScorer make_stub_scorer(std::map<std::string, double> token_probs, std::size_t vocab_size,
                            std::uint64_t seed = 0);

/// Word-count classifier: score = bias + sum of weights over words not
/// excluded by the mask. Satisfies the empty-mask identity exactly.
class StubWordClassifier final : public MaskableClassifier {
public:
    explicit StubWordClassifier(std::map<std::string, double> word_weights, double bias = 0.0);

    double classify(const std::string& text) const override;
    double classify_masked(const std::string& text,
                           const std::vector<WordSpan>& ignored) const override;
    std::string name() const override { return "stub-classifier"; }

private:
    std::map<std::string, double> weights_;
    double bias_;
};

/// Chat backend scripted by a response function; optionally fails the
/// first `fail_first` calls to exercise retry and skip paths.
class ScriptedChatGenerator final : public ChatGenerator {
public:
    explicit ScriptedChatGenerator(std::function<std::string(const std::string&)> responder,
                                   int fail_first = 0);

    std::string complete(const std::string& prompt) override;
    std::string name() const override { return "scripted-chat"; }

    const std::vector<std::string>& prompts_seen() const { return prompts_; }

private:
    std::function<std::string(const std::string&)> responder_;
    int fail_remaining_;
    std::vector<std::string> prompts_;
    std::mutex mutex_;
};

/// Embedder with fixed vectors per exact text, falling back to a
/// seeded hash vector so unknown texts still embed deterministically.
class StubEmbedder final : public TextEmbedder {
public:
    StubEmbedder(std::size_t dimension, std::map<std::string, std::vector<double>> fixed = {});

    std::vector<double> embed(const std::string& text) const override;
    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "stub-embedder"; }

private:
    std::size_t dimension_;
    std::map<std::string, std::vector<double>> fixed_;
};

class IdentityInfiller final : public MaskInfiller {
public:
    std::string infill(const std::string& text, const std::vector<WordSpan>&) const override {
        return text;
    }
    std::string name() const override { return "identity-infiller"; }
};

/// Infiller scripted by a word supplier: each masked word is replaced by
/// the next word from the supplier, in span order.
class ScriptedInfiller final : public MaskInfiller {
public:
    explicit ScriptedInfiller(std::function<std::string(std::size_t call, std::size_t slot)> words);

    std::string infill(const std::string& text, const std::vector<WordSpan>& masked) const override;
    std::string name() const override { return "scripted-infiller"; }

private:
    std::function<std::string(std::size_t, std::size_t)> words_;
    mutable std::size_t calls_ = 0;
};

}  // namespace raft
