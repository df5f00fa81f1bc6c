#include "raft/substitution/candidates.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "raft/backends/tagger.hpp"
#include "raft/core/segment.hpp"

namespace raft {

namespace {

constexpr const char* kPromptHead =
    "Q: Given some input paragraph, we have highlighted a word using brackets. List top ";
constexpr const char* kPromptTail =
    " alternative words for it that ensure grammar correctness and semantic fluency. "
    "Output words only.\n";
constexpr const char* kPromptAnswer = "\nA: The alternative words are 1. 2. ...";

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_strippable(char c) {
    switch (c) {
        case '"': case '\'': case '`': case '.': case ',': case ';': case ':':
        case '!': case '?': case '(': case ')': case '[': case ']': case '{':
        case '}': case '*': case '<': case '>':
            return true;
        default:
            return std::isspace(static_cast<unsigned char>(c)) != 0;
    }
}

std::string strip_item(std::string item) {
    // also trim typographic quotes
    auto drop_prefix = [&](const char* utf8, std::size_t len) {
        while (item.size() >= len && item.compare(0, len, utf8) == 0) item.erase(0, len);
    };
    auto drop_suffix = [&](const char* utf8, std::size_t len) {
        while (item.size() >= len && item.compare(item.size() - len, len, utf8) == 0)
            item.erase(item.size() - len);
    };
    std::size_t before;
    do {
        before = item.size();
        while (!item.empty() && is_strippable(item.front())) item.erase(item.begin());
        while (!item.empty() && is_strippable(item.back())) item.pop_back();
        drop_prefix("\xE2\x80\x98", 3);  // left single quote
        drop_prefix("\xE2\x80\x9C", 3);  // left double quote
        drop_suffix("\xE2\x80\x99", 3);
        drop_suffix("\xE2\x80\x9D", 3);
    } while (item.size() != before);
    return item;
}

/// Sentence-cased list items ("Glad") come from response formatting, not
/// the word itself; all-caps and mixed-case tokens are left alone.
std::string normalize_case(std::string word) {
    if (word.size() < 2) return word;
    unsigned char first = static_cast<unsigned char>(word[0]);
    if (!std::isupper(first)) return word;
    for (std::size_t i = 1; i < word.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(word[i]);
        if (std::isupper(c)) return word;  // NASA, McDonald
    }
    word[0] = static_cast<char>(std::tolower(first));
    return word;
}

/// A usable candidate segments to exactly one word whose surface is the
/// whole string (no embedded punctuation to leak into the passage).
bool is_single_word(const std::string& candidate) {
    if (candidate.empty()) return false;
    try {
        WordSequence seq = segment_words(candidate);
        return seq.n_words() == 1 && seq.words[0].surface == candidate;
    } catch (const Error&) {
        return false;
    }
}

std::vector<std::string> split_numbered(const std::string& text) {
    // items sit between "<digits>." or "<digits>)" markers
    std::vector<std::string> items;
    std::size_t i = 0;
    std::size_t item_start = std::string::npos;
    auto flush = [&](std::size_t end) {
        if (item_start != std::string::npos && end > item_start)
            items.push_back(text.substr(item_start, end - item_start));
        item_start = std::string::npos;
    };
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && (text[j] == '.' || text[j] == ')')) {
                flush(i);
                i = j + 1;
                item_start = i;
                continue;
            }
        }
        ++i;
    }
    flush(text.size());
    return items;
}

bool has_numbered_marker(const std::string& text) {
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(text[i])) &&
            (text[i + 1] == '.' || text[i + 1] == ')'))
            return true;
    }
    return false;
}

std::vector<std::string> split_separators(const std::string& text) {
    std::vector<std::string> items;
    std::string current;
    for (char c : text) {
        if (c == ',' || c == '\n' || c == ';') {
            items.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    items.push_back(current);
    return items;
}

}  // namespace

std::string build_prompt(const WordSequence& seq, std::size_t word_index, int t) {
    if (word_index >= seq.n_words())
        raise(ErrorKind::invalid_input, "word index out of range");
    const WordSpan& span = seq.words[word_index];
    std::string paragraph;
    paragraph.reserve(seq.text.size() + 2);
    paragraph.append(seq.text, 0, span.start);
    paragraph.push_back('[');
    paragraph.append(span.surface);
    paragraph.push_back(']');
    paragraph.append(seq.text, span.end, seq.text.size() - span.end);

    std::string prompt;
    prompt.reserve(paragraph.size() + 160);
    prompt.append(kPromptHead);
    prompt.append(std::to_string(t));
    prompt.append(kPromptTail);
    prompt.append(paragraph);
    prompt.append(kPromptAnswer);
    return prompt;
}

std::vector<std::string> parse_candidates(const std::string& response, int t) {
    if (t < 1) raise(ErrorKind::validation, "t must be >= 1");

    std::string body = response;
    // drop a leading "A:" and/or restated preamble so plain-list replies
    // ("The alternative words are glad, joyful") still parse
    auto strip_prefix_ci = [&body](const std::string& prefix) {
        if (body.size() < prefix.size()) return;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(body[i])) !=
                std::tolower(static_cast<unsigned char>(prefix[i])))
                return;
        }
        body.erase(0, prefix.size());
    };
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front())))
        body.erase(body.begin());
    strip_prefix_ci("a:");
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front())))
        body.erase(body.begin());
    strip_prefix_ci("the alternative words are");

    std::vector<std::string> items =
        has_numbered_marker(body) ? split_numbered(body) : split_separators(body);

    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (std::string& item : items) {
        if (out.size() >= static_cast<std::size_t>(t)) break;
        std::string word = strip_item(std::move(item));
        if (word.empty() || !is_single_word(word)) continue;  // multi-word entries dropped
        word = normalize_case(std::move(word));
        if (!seen.insert(lower_ascii(word)).second) continue;
        out.push_back(std::move(word));
    }
    return out;
}

std::vector<std::string> gen_candidates_embedding(const std::string& word, int t,
                                                  const WordVectorIndex& index) {
    if (t < 1) raise(ErrorKind::validation, "t must be >= 1");
    if (!index.contains(word)) return {};
    // over-fetch: some neighbors are multi-word entries or case variants
    auto neighbors = index.nearest(word, static_cast<std::size_t>(t) * 3 + 8);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& n : neighbors) {
        if (out.size() >= static_cast<std::size_t>(t)) break;
        if (!is_single_word(n.word)) continue;
        if (same_word_ci(n.word, word)) continue;
        if (!seen.insert(lower_ascii(n.word)).second) continue;
        out.push_back(n.word);
    }
    return out;
}

std::vector<std::string> filter_pos(const WordSequence& seq, std::size_t word_index,
                                    const std::vector<std::string>& candidates,
                                    const PosTagger& tagger, bool coarse) {
    if (word_index >= seq.n_words())
        raise(ErrorKind::invalid_input, "word index out of range");
    if (candidates.empty()) return {};

    std::vector<std::string> surfaces;
    surfaces.reserve(seq.n_words());
    for (const WordSpan& w : seq.words) surfaces.push_back(w.surface);

    std::vector<std::string> original_tags;
    try {
        original_tags = tagger.tag(surfaces);
    } catch (const std::exception& e) {
        raise(ErrorKind::filtering, std::string("tagger failed: ") + e.what());
    }
    if (original_tags.size() != surfaces.size())
        raise(ErrorKind::filtering, "tagger returned wrong tag count");
    std::string original_tag = original_tags[word_index];
    if (coarse) original_tag = coarse_pos_tag(original_tag);

    std::vector<std::string> kept;
    for (const std::string& candidate : candidates) {
        std::string substituted = apply_replacement(seq, word_index, candidate);
        WordSequence new_seq = segment_words(substituted);
        if (new_seq.n_words() != seq.n_words()) continue;  // candidate broke segmentation
        std::vector<std::string> new_surfaces;
        new_surfaces.reserve(new_seq.n_words());
        for (const WordSpan& w : new_seq.words) new_surfaces.push_back(w.surface);
        std::vector<std::string> new_tags;
        try {
            new_tags = tagger.tag(new_surfaces);
        } catch (const std::exception& e) {
            raise(ErrorKind::filtering, std::string("tagger failed: ") + e.what());
        }
        if (new_tags.size() != new_surfaces.size())
            raise(ErrorKind::filtering, "tagger returned wrong tag count");
        std::string candidate_tag = new_tags[word_index];
        if (coarse) candidate_tag = coarse_pos_tag(candidate_tag);
        if (candidate_tag == original_tag) kept.push_back(candidate);
    }
    return kept;
}

CandidateSet build_candidate_set(const WordSequence& seq, std::size_t word_index,
                                 std::vector<std::string> raw, GeneratorKind generator,
                                 const PosTagger* tagger, bool pos_filter, bool coarse) {
    if (word_index >= seq.n_words())
        raise(ErrorKind::invalid_input, "word index out of range");
    const std::string& original = seq.words[word_index].surface;

    CandidateSet set;
    set.word_index = word_index;
    set.generator = generator;
    std::unordered_set<std::string> seen;
    for (std::string& candidate : raw) {
        if (candidate.empty()) continue;
        if (!is_single_word(candidate)) continue;
        if (same_word_ci(candidate, original)) continue;
        if (!seen.insert(lower_ascii(candidate)).second) continue;
        set.raw.push_back(std::move(candidate));
    }
    if (pos_filter && tagger != nullptr)
        set.pos_filtered = filter_pos(seq, word_index, set.raw, *tagger, coarse);
    else
        set.pos_filtered = set.raw;
    return set;
}

std::vector<std::string> ChatCandidateGenerator::generate(const WordSequence& seq,
                                                          std::size_t word_index, int t) {
    std::string prompt = build_prompt(seq, word_index, t);
    std::string response = chat_->complete(prompt);
    return parse_candidates(response, t);
}

std::vector<std::string> EmbeddingCandidateGenerator::generate(const WordSequence& seq,
                                                               std::size_t word_index, int t) {
    return gen_candidates_embedding(seq.words.at(word_index).surface, t, *index_);
}

}  // namespace raft
