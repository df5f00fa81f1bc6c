#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "raft/core/types.hpp"

namespace raft {

struct ScoredToken {
    std::string text;
    std::size_t start = 0;  // byte offsets into the scored text
    std::size_t end = 0;
    double log_prob = 0.0;
    double rank = 1.0;  // 1-based rank in the next-token distribution
};

struct SampledToken {
    std::string text;
    double log_prob = 0.0;
};

/// A causal language model: per-token log-probabilities and ranks, plus
/// sampling from the conditional distribution at a position.
class TokenScorer {
public:
    virtual ~TokenScorer() = default;

    virtual std::vector<ScoredToken> score_tokens(const std::string& text) const = 0;

    /// Draws n tokens from the conditional distribution at `position`
    /// (a token index as produced by score_tokens). Implementations
    /// without sampling support throw a capability error.
    virtual std::vector<SampledToken> sample_alternatives(const std::string& text,
                                                          std::size_t position,
                                                          std::size_t n) const = 0;

    /// Full conditional distribution at a position, when the model is
    /// small enough to enumerate. Empty means unsupported; callers fall
    /// back to sampling.
    virtual std::vector<SampledToken> enumerate_alternatives(const std::string& /*text*/,
                                                             std::size_t /*position*/) const {
        return {};
    }

    virtual std::size_t vocab_size() const = 0;
    virtual std::string name() const = 0;
};

/// A supervised machine-text classifier that can exclude word spans from
/// its attention. classify(text) == classify_masked(text, {}) exactly.
class MaskableClassifier {
public:
    virtual ~MaskableClassifier() = default;
    virtual double classify(const std::string& text) const = 0;
    virtual double classify_masked(const std::string& text,
                                   const std::vector<WordSpan>& ignored) const = 0;
    virtual std::string name() const = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{100};
    double backoff_factor = 2.0;
    std::chrono::milliseconds timeout{30000};
};

/// A prompt-in, completion-out text generator (chat model).
class ChatGenerator {
public:
    virtual ~ChatGenerator() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string name() const = 0;
};

class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::vector<double> embed(const std::string& text) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
};

class WordVectorIndex {
public:
    struct Neighbor {
        std::string word;
        double similarity = 0.0;
    };

    virtual ~WordVectorIndex() = default;

    /// n nearest in-vocabulary words by cosine similarity, descending.
    /// The query word itself is never returned.
    virtual std::vector<Neighbor> nearest(const std::string& word, std::size_t n) const = 0;
    virtual bool contains(const std::string& word) const = 0;
    virtual std::string name() const = 0;
};

class PosTagger {
public:
    virtual ~PosTagger() = default;
    /// One tag per word, in order; words are given in sentence context.
    virtual std::vector<std::string> tag(const std::vector<std::string>& words) const = 0;
    virtual std::string name() const = 0;
};

/// Replaces masked word spans with generated text, leaving everything
/// outside the spans unchanged.
class MaskInfiller {
public:
    virtual ~MaskInfiller() = default;
    virtual std::string infill(const std::string& text,
                               const std::vector<WordSpan>& masked) const = 0;
    virtual std::string name() const = 0;
};

}  // namespace raft
