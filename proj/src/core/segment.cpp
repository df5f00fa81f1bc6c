#include "raft/core/segment.hpp"

#include <cctype>

namespace raft {

namespace {

struct Codepoint {
    char32_t value;
    std::size_t length;  // bytes consumed
};

Codepoint decode_utf8(const std::string& s, std::size_t i) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        char32_t cp = (b0 & 0x1Fu) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
        return {cp, 2};
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        char32_t cp = (b0 & 0x0Fu) << 12 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
        return {cp, 3};
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        char32_t cp = (b0 & 0x07u) << 18 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
        return {cp, 4};
    }
    // Invalid byte: treat as an opaque single-byte symbol so segmentation
    // stays total and reconstruction exact.
    return {b0, 1};
}

bool is_unicode_punct_or_space(char32_t cp) {
    if (cp == 0xA0 || cp == 0xA1 || cp == 0xBF || cp == 0xAB || cp == 0xBB) return true;
    if (cp == 0xD7 || cp == 0xF7) return true;
    if (cp >= 0x2000 && cp <= 0x206F) return true;   // general punctuation
    if (cp >= 0x2E00 && cp <= 0x2E7F) return true;   // supplemental punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return true;   // CJK punctuation
    if (cp >= 0xFE50 && cp <= 0xFE6F) return true;
    if (cp >= 0xFF00 && cp <= 0xFF0F) return true;
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;
    return false;
}

bool is_word_cp(char32_t cp) {
    if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
    return !is_unicode_punct_or_space(cp);
}

bool is_joiner_cp(char32_t cp) {
    // hyphen, apostrophe and their common typographic variants
    return cp == '-' || cp == '\'' || cp == 0x2019 || cp == 0x2010 || cp == 0x2011 || cp == 0x02BC;
}

}  // namespace

WordSequence segment_words(const std::string& text) {
    if (text.empty()) raise(ErrorKind::invalid_input, "cannot segment empty text");

    WordSequence seq;
    seq.text = text;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        Codepoint cp = decode_utf8(text, i);
        if (!is_word_cp(cp.value)) {
            i += cp.length;
            continue;
        }
        std::size_t start = i;
        std::size_t end = i + cp.length;
        while (end < n) {
            Codepoint next = decode_utf8(text, end);
            if (is_word_cp(next.value)) {
                end += next.length;
                continue;
            }
            if (is_joiner_cp(next.value)) {
                std::size_t after = end + next.length;
                if (after < n) {
                    Codepoint following = decode_utf8(text, after);
                    if (is_word_cp(following.value)) {
                        end = after + following.length;
                        continue;
                    }
                }
            }
            break;
        }
        WordSpan span;
        span.index = seq.words.size();
        span.start = start;
        span.end = end;
        span.surface = text.substr(start, end - start);
        seq.words.push_back(std::move(span));
        i = end;
    }
    return seq;
}

std::string reconstruct(const WordSequence& seq) {
    std::string out;
    out.reserve(seq.text.size());
    std::size_t cursor = 0;
    for (const WordSpan& w : seq.words) {
        out.append(seq.text, cursor, w.start - cursor);
        out.append(w.surface);
        cursor = w.end;
    }
    out.append(seq.text, cursor, seq.text.size() - cursor);
    return out;
}

bool is_sentence_initial(const WordSequence& seq, std::size_t word_index) {
    if (word_index >= seq.words.size())
        raise(ErrorKind::invalid_input, "word index out of range");
    if (word_index == 0) return true;
    std::size_t gap_begin = seq.words[word_index - 1].end;
    std::size_t gap_end = seq.words[word_index].start;
    for (std::size_t i = gap_begin; i < gap_end; ++i) {
        char c = seq.text[i];
        if (c == '.' || c == '!' || c == '?') return true;
    }
    return false;
}

std::string apply_replacement(const WordSequence& seq, std::size_t word_index,
                              const std::string& replacement) {
    if (word_index >= seq.words.size())
        raise(ErrorKind::invalid_input, "word index out of range");
    const WordSpan& span = seq.words[word_index];
    std::string word = replacement;
    if (!word.empty() && !span.surface.empty() && is_sentence_initial(seq, word_index)) {
        unsigned char orig0 = static_cast<unsigned char>(span.surface[0]);
        unsigned char repl0 = static_cast<unsigned char>(word[0]);
        if (std::isupper(orig0) && std::islower(repl0))
            word[0] = static_cast<char>(std::toupper(repl0));
        else if (std::islower(orig0) && std::isupper(repl0))
            word[0] = static_cast<char>(std::tolower(repl0));
    }
    std::string out;
    out.reserve(seq.text.size() + word.size());
    out.append(seq.text, 0, span.start);
    out.append(word);
    out.append(seq.text, span.end, seq.text.size() - span.end);
    return out;
}

bool same_word_ci(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        unsigned char ca = static_cast<unsigned char>(a[i]);
        unsigned char cb = static_cast<unsigned char>(b[i]);
        if (std::tolower(ca) != std::tolower(cb)) return false;
    }
    return true;
}

}  // namespace raft
