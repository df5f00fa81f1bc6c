#include "raft/backends/classifier.hpp"

namespace raft {

ScorerBackedClassifier::ScorerBackedClassifier(std::shared_ptr<const TokenScorer> scorer)
    : scorer_(std::move(scorer)) {
    if (!scorer_) raise(ErrorKind::invalid_input, "classifier needs a scorer");
}

double ScorerBackedClassifier::classify(const std::string& text) const {
    return classify_masked(text, {});
}

double ScorerBackedClassifier::classify_masked(const std::string& text,
                                               const std::vector<WordSpan>& ignored) const {
    auto tokens = scorer_->score_tokens(text);
    if (tokens.empty()) raise(ErrorKind::invalid_input, "text has no scoreable tokens");
    double total = 0.0;
    std::size_t kept = 0;
    for (const auto& t : tokens) {
        bool masked = false;
        for (const WordSpan& m : ignored) {
            if (t.start < m.end && m.start < t.end) {
                masked = true;
                break;
            }
        }
        if (masked) continue;
        total += t.log_prob;
        ++kept;
    }
    if (kept == 0) return 0.0;  // everything masked
    return total / static_cast<double>(kept);
}

}  // namespace raft
