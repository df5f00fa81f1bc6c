#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "raft/core/error.hpp"

namespace raft {

/// A paired human/machine passage with provenance metadata.
struct TextSample {
    std::string id;
    std::string human_text;
    std::string machine_text;
    std::string source_model;
    std::string dataset;
};

/// One word of a passage: surface form plus byte offsets into the text.
/// `text.substr(start, end - start) == surface` always holds.
struct WordSpan {
    std::size_t index = 0;
    std::string surface;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string pos_tag;  // empty until tagged
};

/// An immutable passage segmented into ordered, non-overlapping words.
/// Everything between spans (whitespace, punctuation) is preserved in
/// `text`, so the original passage can always be reconstructed exactly.
struct WordSequence {
    std::string text;
    std::vector<WordSpan> words;

    std::size_t n_words() const { return words.size(); }
};

/// Trace of one adopted replacement decision.
struct Substitution {
    std::size_t word_index = 0;
    std::string original;
    std::string replacement;
    std::vector<std::string> candidates_considered;
    double detector_score_after = 0.0;
};

enum class RankingMode { next_token, mask_ablation, random_order };
enum class SelectionMode { greedy, random_pick };
enum class GeneratorKind { chat, embedding };

std::string to_string(RankingMode mode);
std::string to_string(SelectionMode mode);
std::string to_string(GeneratorKind kind);
RankingMode ranking_mode_from_string(const std::string& name);
SelectionMode selection_mode_from_string(const std::string& name);
GeneratorKind generator_kind_from_string(const std::string& name);

struct AttackConfig {
    double mask_rate = 0.10;               // fraction k of words eligible for substitution
    int num_candidates = 10;               // t candidates per word
    std::optional<double> threshold;       // early-stop tau; absent = run the full budget
    bool pos_filter = true;
    bool coarse_pos = false;               // compare coarse tag classes instead of full tags
    RankingMode ranking_mode = RankingMode::next_token;
    SelectionMode selection_mode = SelectionMode::greedy;
    GeneratorKind generator = GeneratorKind::chat;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(mask_rate > 0.0 && mask_rate <= 1.0))
            raise(ErrorKind::validation, "mask_rate k must be in (0,1]");
        if (num_candidates < 1)
            raise(ErrorKind::validation, "num_candidates t must be >= 1");
    }
};

/// Full trace of one attacked sample: texts, decisions, scores, timing.
struct AttackRecord {
    std::string sample_id;
    std::string original_text;
    std::string perturbed_text;
    std::vector<Substitution> substitutions;
    std::vector<std::size_t> skipped_word_indices;  // words skipped by generator failure or empty candidates
    double score_before = 0.0;
    double score_after = 0.0;
    std::string detector_name;
    std::string ranker_name;
    AttackConfig config_snapshot;
    double elapsed_seconds = 0.0;
};

}  // namespace raft
