#pragma once

#include <memory>

#include "raft/backends/contracts.hpp"

namespace raft {

/// Maskable machine-text classifier backed by a token scorer: the score
/// is the mean log-probability of the tokens whose spans are not
/// excluded. Masking a word removes its tokens from the average, which
/// realizes attention-mask ablation for likelihood-style proxies.
class ScorerBackedClassifier final : public MaskableClassifier {
public:
    explicit ScorerBackedClassifier(std::shared_ptr<const TokenScorer> scorer);

    double classify(const std::string& text) const override;
    double classify_masked(const std::string& text,
                           const std::vector<WordSpan>& ignored) const override;
    std::string name() const override { return "scorer-classifier(" + scorer_->name() + ")"; }

private:
    std::shared_ptr<const TokenScorer> scorer_;
};

}  // namespace raft
