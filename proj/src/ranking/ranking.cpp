#include "raft/ranking/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace raft {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void require_words(const WordSequence& seq) {
    if (seq.words.empty()) raise(ErrorKind::ranking, "sequence has no words to rank");
}

}  // namespace

ImportanceRanking rank_next_token(const WordSequence& seq, const TokenScorer& scorer) {
    require_words(seq);
    auto tokens = scorer.score_tokens(seq.text);
    if (tokens.empty()) raise(ErrorKind::ranking, "scorer produced no tokens");

    ImportanceRanking ranking;
    ranking.mode = RankingMode::next_token;
    ranking.scores.reserve(seq.n_words());
    for (const WordSpan& word : seq.words) {
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& t : tokens) {
            if (t.start < word.end && word.start < t.end) {  // byte intervals intersect
                total += t.log_prob;
                ++count;
            }
        }
        if (count == 0)
            raise(ErrorKind::ranking,
                  "no scorer tokens align with word '" + word.surface + "' at index " +
                      std::to_string(word.index));
        ranking.scores.emplace_back(word.index, total / static_cast<double>(count));
    }
    return ranking;
}

ImportanceRanking rank_mask_ablation(const WordSequence& seq,
                                     const MaskableClassifier& classifier) {
    require_words(seq);
    ImportanceRanking ranking;
    ranking.mode = RankingMode::mask_ablation;
    ranking.scores.reserve(seq.n_words());
    const double base = classifier.classify(seq.text);
    for (const WordSpan& word : seq.words) {
        double masked = classifier.classify_masked(seq.text, {word});
        ranking.scores.emplace_back(word.index, std::fabs(base - masked));
    }
    return ranking;
}

ImportanceRanking rank_random(const WordSequence& seq, std::uint64_t seed) {
    require_words(seq);
    const std::size_t n = seq.n_words();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::uint64_t state = mix64(seed + 0x5EEDull);
    for (std::size_t i = n; i > 1; --i) {
        state = mix64(state);
        std::size_t j = static_cast<std::size_t>(state % i);
        std::swap(perm[i - 1], perm[j]);
    }
    ImportanceRanking ranking;
    ranking.mode = RankingMode::random_order;
    ranking.scores.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ranking.scores.emplace_back(i, static_cast<double>(perm[i]));
    return ranking;
}

std::size_t substitution_budget(double k, std::size_t n_words) {
    if (!(k > 0.0 && k <= 1.0)) raise(ErrorKind::validation, "k must be in (0,1]");
    if (n_words == 0) return 0;
    // small backoff so binary representations of k*N that land a hair
    // above an integer (0.1 * 20) do not inflate the ceiling
    double raw = std::ceil(k * static_cast<double>(n_words) - 1e-9);
    auto budget = static_cast<std::size_t>(std::max(1.0, raw));
    return std::min(budget, n_words);
}

std::vector<std::size_t> select_top_k(ImportanceRanking& ranking, double k, std::size_t n_words) {
    if (ranking.scores.size() != n_words)
        raise(ErrorKind::validation, "ranking does not cover the sequence");
    const std::size_t budget = substitution_budget(k, n_words);

    std::vector<std::pair<std::size_t, double>> order = ranking.scores;
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    ranking.selected.clear();
    ranking.selected.reserve(budget);
    for (std::size_t i = 0; i < budget && i < order.size(); ++i)
        ranking.selected.push_back(order[i].first);
    return ranking.selected;
}

}  // namespace raft
