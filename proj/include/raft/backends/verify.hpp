#pragma once

#include <string>
#include <vector>

#include "raft/backends/contracts.hpp"

namespace raft {

struct ConformanceCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ConformanceReport {
    std::string backend;
    std::vector<ConformanceCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Contract conformance probes. A backend that throws fails the check;
/// nothing propagates out of these functions.
ConformanceReport verify_scorer(const TokenScorer& scorer,
                                const std::vector<std::string>& probe_texts = {});
ConformanceReport verify_classifier(const MaskableClassifier& classifier,
                                    const std::vector<std::string>& probe_texts = {});
ConformanceReport verify_chat(ChatGenerator& chat);
ConformanceReport verify_embedder(const TextEmbedder& embedder,
                                  const std::vector<std::string>& probe_texts = {});
ConformanceReport verify_tagger(const PosTagger& tagger);
ConformanceReport verify_word_vectors(const WordVectorIndex& index,
                                      const std::vector<std::string>& probe_words);

std::string format_report(const ConformanceReport& report);

}  // namespace raft
