#pragma once

#include <memory>
#include <string>
#include <vector>

#include "raft/backends/contracts.hpp"
#include "raft/core/types.hpp"

namespace raft {

/// Replacement candidates for one word: as generated, and after the
/// POS-consistency filter. Candidates never equal the original surface
/// (case-insensitively) and are always single words.
struct CandidateSet {
    std::size_t word_index = 0;
    std::vector<std::string> raw;
    std::vector<std::string> pos_filtered;
    GeneratorKind generator = GeneratorKind::chat;
};

/// The candidate-generation prompt, with the target word bracketed inside
/// the paragraph and {t} interpolated.
std::string build_prompt(const WordSequence& seq, std::size_t word_index, int t);

/// Extracts up to t single-word candidates from a model response.
/// Handles "1. glad 2. joyful" numbered lists and comma/newline-separated
/// lists; strips quotes and punctuation; sentence-cased items are
/// lowercased (all-caps or mixed-case items are kept as written).
/// Multi-word entries are dropped. No extractable candidates is an empty
/// list, not an error.
std::vector<std::string> parse_candidates(const std::string& response, int t);

/// Nearest t in-vocabulary single-word neighbors, similarity descending.
/// Out-of-vocabulary words yield an empty list.
std::vector<std::string> gen_candidates_embedding(const std::string& word, int t,
                                                  const WordVectorIndex& index);

/// Keeps the candidates whose in-context tag, after substitution into the
/// sentence, equals the original word's in-context tag. With `coarse` the
/// comparison is on coarse tag classes.
std::vector<std::string> filter_pos(const WordSequence& seq, std::size_t word_index,
                                    const std::vector<std::string>& candidates,
                                    const PosTagger& tagger, bool coarse = false);

/// Applies the CandidateSet invariants to raw generator output (drop the
/// original, drop multi-word entries, dedupe) and runs the POS filter
/// when enabled.
CandidateSet build_candidate_set(const WordSequence& seq, std::size_t word_index,
                                 std::vector<std::string> raw, GeneratorKind generator,
                                 const PosTagger* tagger, bool pos_filter, bool coarse = false);

/// Produces raw candidates for a word; chat- and embedding-backed
/// implementations below.
class CandidateGenerator {
public:
    virtual ~CandidateGenerator() = default;
    virtual std::vector<std::string> generate(const WordSequence& seq, std::size_t word_index,
                                              int t) = 0;
    virtual GeneratorKind kind() const = 0;
    virtual std::string name() const = 0;
};

class ChatCandidateGenerator final : public CandidateGenerator {
public:
    explicit ChatCandidateGenerator(std::shared_ptr<ChatGenerator> chat)
        : chat_(std::move(chat)) {}

    std::vector<std::string> generate(const WordSequence& seq, std::size_t word_index,
                                      int t) override;
    GeneratorKind kind() const override { return GeneratorKind::chat; }
    std::string name() const override { return chat_->name(); }

private:
    std::shared_ptr<ChatGenerator> chat_;
};

class EmbeddingCandidateGenerator final : public CandidateGenerator {
public:
    explicit EmbeddingCandidateGenerator(std::shared_ptr<const WordVectorIndex> index)
        : index_(std::move(index)) {}

    std::vector<std::string> generate(const WordSequence& seq, std::size_t word_index,
                                      int t) override;
    GeneratorKind kind() const override { return GeneratorKind::embedding; }
    std::string name() const override { return index_->name(); }

private:
    std::shared_ptr<const WordVectorIndex> index_;
};

}  // namespace raft
