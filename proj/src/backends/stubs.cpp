#include "raft/backends/stubs.hpp"

#include <algorithm>
#include <cmath>

#include "raft/core/segment.hpp"

namespace raft {

namespace {

// splitmix64; stable across platforms, unlike std distributions
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_text(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

double unit_double(std::uint64_t& state) {
    state = mix64(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
}

}  // namespace

StubScorer::StubScorer(std::map<std::string, double> token_probs, std::size_t vocab_size,
                       std::uint64_t seed)
    : probs_(std::move(token_probs)), vocab_size_(vocab_size), seed_(seed) {
    if (vocab_size_ < probs_.size())
        raise(ErrorKind::validation, "vocab_size smaller than the token spec");
    double total = 0.0;
    for (const auto& [token, p] : probs_) {
        if (p <= 0.0 || p > 1.0)
            raise(ErrorKind::validation, "token probability out of (0,1]: " + token);
        total += p;
    }
    if (total > 1.0 + 1e-9)
        raise(ErrorKind::validation, "token probabilities exceed 1");
    n_unseen_ = vocab_size_ - probs_.size();
    double residual = std::max(0.0, 1.0 - total);
    residual_unit_ = n_unseen_ > 0 ? residual / static_cast<double>(n_unseen_)
                                   : 0.0;
    if (n_unseen_ == 0 && residual > 1e-9)
        raise(ErrorKind::validation, "distribution does not cover the leftover mass");
}

double StubScorer::probability_of(const std::string& token) const {
    auto it = probs_.find(token);
    if (it != probs_.end()) return it->second;
    if (residual_unit_ <= 0.0)
        raise(ErrorKind::invalid_input, "token outside the stub distribution: " + token);
    return residual_unit_;
}

double StubScorer::rank_of(const std::string& token) const {
    double p = probability_of(token);
    std::size_t rank = 1;
    bool known = probs_.count(token) > 0;
    for (const auto& [other, q] : probs_) {
        if (q > p) ++rank;
        // ties broken lexicographically; unseen tokens sort after all spec'd ones
        else if (q == p && (!known || other < token)) ++rank;
    }
    return static_cast<double>(rank);
}

std::vector<ScoredToken> StubScorer::score_tokens(const std::string& text) const {
    WordSequence seq = segment_words(text);
    std::vector<ScoredToken> out;
    out.reserve(seq.n_words());
    for (const WordSpan& w : seq.words) {
        ScoredToken token;
        token.text = w.surface;
        token.start = w.start;
        token.end = w.end;
        token.log_prob = std::log(probability_of(w.surface));
        token.rank = rank_of(w.surface);
        out.push_back(std::move(token));
    }
    return out;
}

std::vector<SampledToken> StubScorer::sample_alternatives(const std::string& text,
                                                          std::size_t position,
                                                          std::size_t n) const {
    // seeded per (text, position) so repeat calls are identical
    std::uint64_t state = mix64(seed_ ^ mix64(hash_text(text) + position * 0x9E37u));
    std::vector<SampledToken> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = unit_double(state);
        double acc = 0.0;
        bool chosen = false;
        for (const auto& [token, p] : probs_) {
            acc += p;
            if (u < acc) {
                out.push_back({token, std::log(p)});
                chosen = true;
                break;
            }
        }
        if (!chosen) {
            // landed in the residual block of unseen synthetic tokens
            std::size_t slot = n_unseen_ > 0
                ? std::min<std::size_t>(n_unseen_ - 1,
                      static_cast<std::size_t>((u - acc) / residual_unit_))
                : 0;
            out.push_back({"<unseen-" + std::to_string(slot) + ">", std::log(residual_unit_)});
        }
    }
    return out;
}

std::vector<SampledToken> StubScorer::enumerate_alternatives(const std::string&,
                                                             std::size_t) const {
    if (n_unseen_ > 10000) return {};  // too large to enumerate
    std::vector<SampledToken> out;
    out.reserve(probs_.size() + n_unseen_);
    for (const auto& [token, p] : probs_) out.push_back({token, std::log(p)});
    for (std::size_t i = 0; i < n_unseen_; ++i) {
        if (residual_unit_ <= 0.0) break;
        out.push_back({"<unseen-" + std::to_string(i) + ">", std::log(residual_unit_)});
    }
    return out;
}

StubScorer make_stub_scorer(std::map<std::string, double> token_probs, std::size_t vocab_size,
                            std::uint64_t seed) {
    return StubScorer(std::move(token_probs), vocab_size, seed);
}

StubWordClassifier::StubWordClassifier(std::map<std::string, double> word_weights, double bias)
    : weights_(std::move(word_weights)), bias_(bias) {}

double StubWordClassifier::classify(const std::string& text) const {
    return classify_masked(text, {});
}

double StubWordClassifier::classify_masked(const std::string& text,
                                           const std::vector<WordSpan>& ignored) const {
    WordSequence seq = segment_words(text);
    double score = bias_;
    for (const WordSpan& w : seq.words) {
        bool masked = false;
        for (const WordSpan& m : ignored) {
            if (w.start < m.end && m.start < w.end) {
                masked = true;
                break;
            }
        }
        if (masked) continue;
        auto it = weights_.find(w.surface);
        if (it != weights_.end()) score += it->second;
    }
    return score;
}

ScriptedChatGenerator::ScriptedChatGenerator(
    std::function<std::string(const std::string&)> responder, int fail_first)
    : responder_(std::move(responder)), fail_remaining_(fail_first) {}

std::string ScriptedChatGenerator::complete(const std::string& prompt) {
    std::lock_guard lock(mutex_);
    prompts_.push_back(prompt);
    if (fail_remaining_ > 0) {
        --fail_remaining_;
        raise(ErrorKind::backend, "scripted chat failure");
    }
    return responder_(prompt);
}

StubEmbedder::StubEmbedder(std::size_t dimension, std::map<std::string, std::vector<double>> fixed)
    : dimension_(dimension), fixed_(std::move(fixed)) {
    for (const auto& [text, vec] : fixed_) {
        if (vec.size() != dimension_)
            raise(ErrorKind::validation, "fixed embedding has wrong dimension: " + text);
    }
}

std::vector<double> StubEmbedder::embed(const std::string& text) const {
    auto it = fixed_.find(text);
    if (it != fixed_.end()) return it->second;
    std::uint64_t state = mix64(hash_text(text));
    std::vector<double> v(dimension_);
    for (double& x : v) x = unit_double(state) * 2.0 - 1.0;
    return v;
}

ScriptedInfiller::ScriptedInfiller(
    std::function<std::string(std::size_t call, std::size_t slot)> words)
    : words_(std::move(words)) {}

std::string ScriptedInfiller::infill(const std::string& text,
                                     const std::vector<WordSpan>& masked) const {
    std::size_t call = calls_++;
    std::string out;
    out.reserve(text.size());
    std::size_t cursor = 0;
    std::size_t slot = 0;
    for (const WordSpan& span : masked) {
        out.append(text, cursor, span.start - cursor);
        out.append(words_(call, slot++));
        cursor = span.end;
    }
    out.append(text, cursor, text.size() - cursor);
    return out;
}

}  // namespace raft
