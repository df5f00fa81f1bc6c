#pragma once

#include <string>

#include "raft/core/types.hpp"

namespace raft {

/// Splits a passage into words: maximal runs of letters/digits, with
/// hyphens and apostrophes kept when they join two such runs
/// ("state-of-the-art", "don't"). Punctuation and whitespace survive as
/// inter-span text, so reconstruct() is byte-exact. Offsets are byte
/// offsets and always fall on UTF-8 codepoint boundaries.
///
/// Throws invalid_input on empty text.
WordSequence segment_words(const std::string& text);

/// Rebuilds the passage from spans plus inter-span text. Equals the
/// original input by construction; exposed for tests and sanity checks.
std::string reconstruct(const WordSequence& seq);

/// True if the word at `word_index` starts the passage or follows a
/// sentence terminator (. ! ?) in the inter-span gap.
bool is_sentence_initial(const WordSequence& seq, std::size_t word_index);

/// Returns the passage text with the word at `word_index` replaced.
/// When the site is sentence-initial, the case of the original's first
/// letter is copied onto the replacement.
std::string apply_replacement(const WordSequence& seq, std::size_t word_index,
                              const std::string& replacement);

/// Case-insensitive equality on ASCII letters; used to reject candidates
/// that merely re-case the original word.
bool same_word_ci(const std::string& a, const std::string& b);

}  // namespace raft
