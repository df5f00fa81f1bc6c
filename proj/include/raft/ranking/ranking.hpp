#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "raft/backends/contracts.hpp"
#include "raft/core/types.hpp"

namespace raft {

/// Per-word proxy importances and the selected substitution set.
/// `scores` covers every word index exactly once. `selected` is filled by
/// select_top_k and is ordered by importance descending (the attack's
/// processing order), ties broken by lower word index.
struct ImportanceRanking {
    RankingMode mode = RankingMode::next_token;
    std::vector<std::pair<std::size_t, double>> scores;
    std::vector<std::size_t> selected;
};

/// Importance = mean log-probability of the word's aligned tokens under
/// the scorer: the likelier the model finds a word, the more replacing it
/// disturbs the text's statistics. A word aligns to every scorer token
/// whose byte interval intersects its span; the first word's tokens carry
/// the scorer's unconditional probability.
ImportanceRanking rank_next_token(const WordSequence& seq, const TokenScorer& scorer);

/// Importance = |classify(text) - classify_masked(text, {word})|, one
/// word at a time against the unmodified text.
ImportanceRanking rank_mask_ablation(const WordSequence& seq, const MaskableClassifier& classifier);

/// Importances are a seeded random permutation of 0..N-1.
ImportanceRanking rank_random(const WordSequence& seq, std::uint64_t seed);

/// Top ceil(k*N) indices by importance (capped at N), tie-break lower
/// index first, returned in importance-descending order. Also stored into
/// ranking.selected.
std::vector<std::size_t> select_top_k(ImportanceRanking& ranking, double k, std::size_t n_words);

/// The substitution budget: min(ceil(k*N), N), never less than 1 for k > 0.
std::size_t substitution_budget(double k, std::size_t n_words);

}  // namespace raft
