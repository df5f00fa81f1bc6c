#include "raft/backends/tagger.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "raft/core/error.hpp"

namespace raft {

namespace {

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool ends_with(const std::string& s, const char* suffix) {
    std::string_view v(suffix);
    return s.size() >= v.size() && s.compare(s.size() - v.size(), v.size(), v) == 0;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s)
        if (!std::isdigit(c) && c != '-' && c != '.') return false;
    return true;
}

}  // namespace

LexiconPosTagger::LexiconPosTagger(std::map<std::string, std::string> lexicon)
    : lexicon_(std::move(lexicon)) {}

LexiconPosTagger LexiconPosTagger::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open lexicon file: " + path);
    std::map<std::string, std::string> lexicon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string word, tag;
        if (!(fields >> word >> tag))
            raise(ErrorKind::parse, "lexicon line " + std::to_string(line_no) + ": expected word and tag");
        lexicon[word] = tag;
    }
    return LexiconPosTagger(std::move(lexicon));
}

std::vector<std::string> LexiconPosTagger::tag(const std::vector<std::string>& words) const {
    std::vector<std::string> tags;
    tags.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string& word = words[i];
        auto exact = lexicon_.find(word);
        if (exact != lexicon_.end()) {
            tags.push_back(exact->second);
            continue;
        }
        auto lower = lexicon_.find(lower_ascii(word));
        if (lower != lexicon_.end()) {
            tags.push_back(lower->second);
            continue;
        }
        if (all_digits(word)) {
            tags.push_back("CD");
            continue;
        }
        std::string low = lower_ascii(word);
        if (ends_with(low, "ing")) tags.push_back("VBG");
        else if (ends_with(low, "ed")) tags.push_back("VBD");
        else if (ends_with(low, "ly")) tags.push_back("RB");
        else if (ends_with(low, "est")) tags.push_back("JJS");
        else if (ends_with(low, "s")) tags.push_back("NNS");
        else if (i > 0 && !word.empty() && std::isupper(static_cast<unsigned char>(word[0])))
            tags.push_back("NNP");  // capitalized mid-sentence
        else tags.push_back("NN");
    }
    return tags;
}

std::string coarse_pos_tag(const std::string& tag) {
    if (tag.rfind("NN", 0) == 0) return "NN";
    if (tag.rfind("VB", 0) == 0) return "VB";
    if (tag.rfind("JJ", 0) == 0) return "JJ";
    if (tag.rfind("RB", 0) == 0) return "RB";
    return tag;
}

}  // namespace raft
