#pragma once

#include <map>
#include <string>

#include "raft/backends/contracts.hpp"

namespace raft {

/// Deterministic lexicon tagger over a Penn-style tag set. Lookup order:
/// exact surface, lowercased surface, then suffix heuristics, then NNP
/// for capitalized unknowns and NN otherwise. Ambiguous words carry one
/// primary tag in the lexicon.
class LexiconPosTagger final : public PosTagger {
public:
    explicit LexiconPosTagger(std::map<std::string, std::string> lexicon);

    /// Lexicon file: one "word<TAB>tag" (or "word tag") entry per line;
    /// '#' starts a comment.
    static LexiconPosTagger load(const std::string& path);

    std::vector<std::string> tag(const std::vector<std::string>& words) const override;
    std::string name() const override { return "lexicon-tagger"; }

    std::size_t lexicon_size() const { return lexicon_.size(); }

private:
    std::map<std::string, std::string> lexicon_;
};

/// Maps a fine-grained tag to its coarse class (NN* -> NN, VB* -> VB,
/// JJ* -> JJ, RB* -> RB); other tags map to themselves.
std::string coarse_pos_tag(const std::string& tag);

}  // namespace raft
