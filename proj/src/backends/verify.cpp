#include "raft/backends/verify.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace raft {

namespace {

const std::vector<std::string>& default_texts() {
    static const std::vector<std::string> texts = {
        "The committee approved the proposal on Tuesday.",
        "Researchers described a new method for measuring rainfall.",
    };
    return texts;
}

template <typename Fn>
void run_check(ConformanceReport& report, const std::string& name, Fn&& fn) {
    ConformanceCheck check;
    check.name = name;
    try {
        std::string detail = fn();
        check.passed = detail.empty();
        check.detail = detail;
    } catch (const std::exception& e) {
        check.passed = false;
        check.detail = std::string("raised: ") + e.what();
    }
    report.checks.push_back(std::move(check));
}

}  // namespace

ConformanceReport verify_scorer(const TokenScorer& scorer,
                                const std::vector<std::string>& probe_texts) {
    const auto& texts = probe_texts.empty() ? default_texts() : probe_texts;
    ConformanceReport report;
    report.backend = scorer.name();

    run_check(report, "score_tokens yields tokens with valid fields", [&]() -> std::string {
        for (const auto& text : texts) {
            auto tokens = scorer.score_tokens(text);
            if (tokens.empty()) return "no tokens for: " + text;
            for (const auto& t : tokens) {
                if (t.log_prob > 1e-9) return "log_prob > 0 for token " + t.text;
                if (t.rank < 1.0) return "rank < 1 for token " + t.text;
            }
        }
        return {};
    });
    run_check(report, "score_tokens is deterministic", [&]() -> std::string {
        auto a = scorer.score_tokens(texts.front());
        auto b = scorer.score_tokens(texts.front());
        if (a.size() != b.size()) return "token count differs between calls";
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].log_prob != b[i].log_prob || a[i].rank != b[i].rank)
                return "scores differ between calls at token " + std::to_string(i);
        return {};
    });
    run_check(report, "sampled alternatives form a sub-distribution", [&]() -> std::string {
        auto samples = scorer.sample_alternatives(texts.front(), 0, 16);
        if (samples.empty()) return "no samples returned";
        std::map<std::string, double> mass;  // one term per distinct token
        for (const auto& s : samples) {
            if (s.log_prob > 1e-9) return "sampled log_prob > 0 for " + s.text;
            mass[s.text] = std::exp(s.log_prob);
        }
        double total = 0.0;
        for (const auto& [token, p] : mass) total += p;
        if (total > 1.0 + 1e-6) return "sampled probabilities sum to " + std::to_string(total);
        return {};
    });
    run_check(report, "sampling is reproducible", [&]() -> std::string {
        auto a = scorer.sample_alternatives(texts.front(), 0, 8);
        auto b = scorer.sample_alternatives(texts.front(), 0, 8);
        if (a.size() != b.size()) return "sample count differs";
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].text != b[i].text || a[i].log_prob != b[i].log_prob)
                return "samples differ at " + std::to_string(i);
        return {};
    });
    return report;
}

ConformanceReport verify_classifier(const MaskableClassifier& classifier,
                                    const std::vector<std::string>& probe_texts) {
    const auto& texts = probe_texts.empty() ? default_texts() : probe_texts;
    ConformanceReport report;
    report.backend = classifier.name();

    run_check(report, "classify equals classify_masked with empty mask", [&]() -> std::string {
        for (const auto& text : texts) {
            double plain = classifier.classify(text);
            double masked = classifier.classify_masked(text, {});
            if (plain != masked) {
                std::ostringstream os;
                os << "classify=" << plain << " classify_masked(empty)=" << masked;
                return os.str();
            }
        }
        return {};
    });
    run_check(report, "classify is deterministic", [&]() -> std::string {
        double a = classifier.classify(texts.front());
        double b = classifier.classify(texts.front());
        return a == b ? std::string{} : "scores differ between calls";
    });
    return report;
}

ConformanceReport verify_chat(ChatGenerator& chat) {
    ConformanceReport report;
    report.backend = chat.name();
    run_check(report, "complete returns a response", [&]() -> std::string {
        std::string reply = chat.complete("Reply with the single word: ready");
        return reply.empty() ? "empty response" : std::string{};
    });
    return report;
}

ConformanceReport verify_embedder(const TextEmbedder& embedder,
                                  const std::vector<std::string>& probe_texts) {
    const auto& texts = probe_texts.empty() ? default_texts() : probe_texts;
    ConformanceReport report;
    report.backend = embedder.name();

    run_check(report, "embedding length equals dimension", [&]() -> std::string {
        for (const auto& text : texts) {
            auto v = embedder.embed(text);
            if (v.size() != embedder.dimension())
                return "got " + std::to_string(v.size()) + " components, dimension is " +
                       std::to_string(embedder.dimension());
        }
        return {};
    });
    run_check(report, "embedding is deterministic", [&]() -> std::string {
        auto a = embedder.embed(texts.front());
        auto b = embedder.embed(texts.front());
        return a == b ? std::string{} : "vectors differ between calls";
    });
    return report;
}

ConformanceReport verify_tagger(const PosTagger& tagger) {
    ConformanceReport report;
    report.backend = tagger.name();
    const std::vector<std::string> words = {"The", "committee", "approved", "the", "proposal"};

    run_check(report, "one tag per word", [&]() -> std::string {
        auto tags = tagger.tag(words);
        if (tags.size() != words.size())
            return std::to_string(tags.size()) + " tags for " + std::to_string(words.size()) +
                   " words";
        for (const auto& t : tags)
            if (t.empty()) return "empty tag";
        return {};
    });
    run_check(report, "tagging is deterministic", [&]() -> std::string {
        return tagger.tag(words) == tagger.tag(words) ? std::string{}
                                                      : "tags differ between calls";
    });
    return report;
}

ConformanceReport verify_word_vectors(const WordVectorIndex& index,
                                      const std::vector<std::string>& probe_words) {
    ConformanceReport report;
    report.backend = index.name();

    run_check(report, "query word excluded from neighbors", [&]() -> std::string {
        for (const auto& word : probe_words) {
            for (const auto& n : index.nearest(word, 10))
                if (n.word == word) return "query returned as its own neighbor: " + word;
        }
        return {};
    });
    run_check(report, "similarities are descending", [&]() -> std::string {
        for (const auto& word : probe_words) {
            auto neighbors = index.nearest(word, 10);
            for (std::size_t i = 1; i < neighbors.size(); ++i)
                if (neighbors[i].similarity > neighbors[i - 1].similarity + 1e-12)
                    return "similarity order violated for: " + word;
        }
        return {};
    });
    return report;
}

std::string format_report(const ConformanceReport& report) {
    std::ostringstream os;
    os << report.backend << ": " << (report.all_passed() ? "ok" : "FAILED") << '\n';
    for (const auto& check : report.checks) {
        os << "  [" << (check.passed ? "pass" : "FAIL") << "] " << check.name;
        if (!check.detail.empty()) os << ": " << check.detail;
        os << '\n';
    }
    return os.str();
}

}  // namespace raft
