#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "raft/backends/contracts.hpp"

namespace raft {

/// Interpolated word-trigram causal language model. Fits by counting over
/// segmented passages; probabilities mix trigram, bigram, unigram and a
/// uniform floor so every in-vocabulary word has nonzero mass in every
/// context. Word identity is the exact surface form.
class NgramLanguageModel {
public:
    struct Weights {
        double trigram = 0.55;
        double bigram = 0.27;
        double unigram = 0.17;
        double uniform = 0.01;
    };

    NgramLanguageModel() = default;
    explicit NgramLanguageModel(Weights weights) : weights_(weights) {}

    void fit(const std::vector<std::string>& passages);

    void save(const std::string& path) const;
    static NgramLanguageModel load(const std::string& path);

    /// log p(word | prev2, prev1). Out-of-vocabulary words map to <unk>,
    /// which carries only the uniform floor.
    double log_prob(const std::string& prev2, const std::string& prev1,
                    const std::string& word) const;

    /// Probability of every vocabulary word in the given context, in
    /// vocabulary order (first-seen order from fit()).
    std::vector<double> conditional(const std::string& prev2, const std::string& prev1) const;

    const std::vector<std::string>& vocabulary() const { return vocab_; }
    std::size_t vocab_index(const std::string& word) const;  // npos if unknown
    bool fitted() const { return !vocab_.empty(); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    static constexpr const char* kBos = "<s>";

private:
    Weights weights_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::size_t> vocab_ids_;
    std::unordered_map<std::uint64_t, double> trigram_;  // packed (c2,c1) -> per-word counts
    std::unordered_map<std::uint64_t, double> bigram_;
    std::unordered_map<std::uint64_t, double> trigram_ctx_;
    std::unordered_map<std::uint64_t, double> bigram_ctx_;
    std::vector<double> unigram_;
    double total_tokens_ = 0.0;

    std::size_t id_or_add(const std::string& word);
    std::size_t context_id(const std::string& word) const;  // <s> and <unk> aware
    double prob_ids(std::size_t c2, std::size_t c1, std::size_t w) const;

    friend class NgramScorer;
};

/// TokenScorer over an NgramLanguageModel. Tokens are the passage's words
/// (same segmentation as the rest of the toolkit), so word/token
/// alignment is one-to-one. Sampling is seeded per (text, position) and
/// the full conditional distribution is enumerable.
class NgramScorer final : public TokenScorer {
public:
    NgramScorer(std::shared_ptr<const NgramLanguageModel> model, std::uint64_t seed = 0,
                std::string name = "ngram-scorer");

    std::vector<ScoredToken> score_tokens(const std::string& text) const override;
    std::vector<SampledToken> sample_alternatives(const std::string& text, std::size_t position,
                                                  std::size_t n) const override;
    std::vector<SampledToken> enumerate_alternatives(const std::string& text,
                                                     std::size_t position) const override;
    std::size_t vocab_size() const override;
    std::string name() const override { return name_; }

    const NgramLanguageModel& model() const { return *model_; }

    /// Greedy decode continuation of `prefix_words`, used by sanity checks
    /// that need maximally model-typical text.
    std::vector<std::string> greedy_continuation(const std::vector<std::string>& prefix_words,
                                                 std::size_t n_words) const;

private:
    std::shared_ptr<const NgramLanguageModel> model_;
    std::uint64_t seed_;
    std::string name_;

    // (context, word) -> (log_prob, rank); rank needs a full vocabulary
    // walk and attack loops rescore near-identical texts constantly.
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::uint64_t, std::pair<double, double>> cache_;

    std::pair<std::string, std::string> context_at(const std::vector<WordSpan>& words,
                                                   std::size_t position) const;
};

/// Infiller that rewrites masked spans with words sampled from the model
/// conditioned on the left context. Span word counts are preserved.
class NgramInfiller final : public MaskInfiller {
public:
    NgramInfiller(std::shared_ptr<const NgramLanguageModel> model, std::uint64_t seed = 0);

    std::string infill(const std::string& text, const std::vector<WordSpan>& masked) const override;
    std::string name() const override { return "ngram-infiller"; }

private:
    std::shared_ptr<const NgramLanguageModel> model_;
    std::uint64_t seed_;
    mutable std::uint64_t calls_ = 0;
};

}  // namespace raft
