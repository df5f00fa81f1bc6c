#include "raft/backends/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "raft/core/segment.hpp"

namespace raft {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_text(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

double unit_double(std::uint64_t& state) {
    state = mix64(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
}

}  // namespace

std::size_t NgramLanguageModel::vocab_index(const std::string& word) const {
    auto it = vocab_ids_.find(word);
    return it == vocab_ids_.end() ? npos : it->second;
}

std::size_t NgramLanguageModel::id_or_add(const std::string& word) {
    auto [it, inserted] = vocab_ids_.try_emplace(word, vocab_.size());
    if (inserted) vocab_.push_back(word);
    return it->second;
}

std::size_t NgramLanguageModel::context_id(const std::string& word) const {
    if (word == kBos) return vocab_.size();  // reserved slot after the vocabulary
    std::size_t id = vocab_index(word);
    return id == npos ? vocab_.size() + 1 : id;  // <unk> context
}

void NgramLanguageModel::fit(const std::vector<std::string>& passages) {
    if (passages.empty()) raise(ErrorKind::invalid_input, "no passages to fit");

    std::vector<std::vector<std::size_t>> tokenized;
    tokenized.reserve(passages.size());
    for (const std::string& passage : passages) {
        WordSequence seq = segment_words(passage);
        std::vector<std::size_t> ids;
        ids.reserve(seq.n_words());
        for (const WordSpan& w : seq.words) ids.push_back(id_or_add(w.surface));
        tokenized.push_back(std::move(ids));
    }

    const std::size_t stride = vocab_.size() + 2;  // + <s>, <unk>
    const std::size_t bos = vocab_.size();
    unigram_.assign(vocab_.size(), 0.0);
    for (const auto& ids : tokenized) {
        std::size_t c2 = bos, c1 = bos;
        for (std::size_t w : ids) {
            unigram_[w] += 1.0;
            total_tokens_ += 1.0;
            bigram_[c1 * stride + w] += 1.0;
            bigram_ctx_[c1] += 1.0;
            std::uint64_t ctx = static_cast<std::uint64_t>(c2) * stride + c1;
            trigram_[ctx * stride + w] += 1.0;
            trigram_ctx_[ctx] += 1.0;
            c2 = c1;
            c1 = w;
        }
    }
}

double NgramLanguageModel::prob_ids(std::size_t c2, std::size_t c1, std::size_t w) const {
    const std::size_t stride = vocab_.size() + 2;
    const double floor = 1.0 / static_cast<double>(vocab_.size());
    if (w >= vocab_.size()) return weights_.uniform * floor;  // <unk>: floor mass only

    double w3 = weights_.trigram, w2 = weights_.bigram, w1 = weights_.unigram;
    std::uint64_t ctx = static_cast<std::uint64_t>(c2) * stride + c1;

    double p = weights_.uniform * floor;
    auto tctx = trigram_ctx_.find(ctx);
    if (tctx != trigram_ctx_.end()) {
        auto t = trigram_.find(ctx * stride + w);
        if (t != trigram_.end()) p += w3 * t->second / tctx->second;
    } else {
        w2 += w3;  // unseen trigram context: fold its weight into the bigram
    }
    auto bctx = bigram_ctx_.find(c1);
    if (bctx != bigram_ctx_.end()) {
        auto b = bigram_.find(c1 * stride + w);
        if (b != bigram_.end()) p += w2 * b->second / bctx->second;
    } else {
        w1 += w2;
    }
    p += w1 * unigram_[w] / total_tokens_;
    return p;
}

double NgramLanguageModel::log_prob(const std::string& prev2, const std::string& prev1,
                                    const std::string& word) const {
    if (!fitted()) raise(ErrorKind::invalid_input, "model not fitted");
    std::size_t w = vocab_index(word);
    if (w == npos) w = vocab_.size() + 1;
    return std::log(prob_ids(context_id(prev2), context_id(prev1), w));
}

std::vector<double> NgramLanguageModel::conditional(const std::string& prev2,
                                                    const std::string& prev1) const {
    if (!fitted()) raise(ErrorKind::invalid_input, "model not fitted");
    std::size_t c2 = context_id(prev2);
    std::size_t c1 = context_id(prev1);
    std::vector<double> probs(vocab_.size());
    for (std::size_t w = 0; w < vocab_.size(); ++w) probs[w] = prob_ids(c2, c1, w);
    return probs;
}

void NgramLanguageModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::io, "cannot write model file: " + path);
    out.precision(17);
    out << "raft-ngram 1\n";
    out << weights_.trigram << ' ' << weights_.bigram << ' ' << weights_.unigram << ' '
        << weights_.uniform << '\n';
    out << vocab_.size() << '\n';
    for (std::size_t i = 0; i < vocab_.size(); ++i)
        out << vocab_[i] << '\t' << unigram_[i] << '\n';
    auto dump = [&out](const std::unordered_map<std::uint64_t, double>& m) {
        out << m.size() << '\n';
        for (const auto& [k, v] : m) out << k << ' ' << v << '\n';
    };
    dump(trigram_);
    dump(trigram_ctx_);
    dump(bigram_);
    dump(bigram_ctx_);
    if (!out) raise(ErrorKind::io, "write failed: " + path);
}

NgramLanguageModel NgramLanguageModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open model file: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "raft-ngram" || version != 1)
        raise(ErrorKind::parse, "not a model file: " + path);

    NgramLanguageModel model;
    in >> model.weights_.trigram >> model.weights_.bigram >> model.weights_.unigram >>
        model.weights_.uniform;
    std::size_t vocab_size = 0;
    in >> vocab_size;
    in.ignore();
    model.vocab_.reserve(vocab_size);
    model.unigram_.reserve(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) {
        std::string line;
        if (!std::getline(in, line)) raise(ErrorKind::parse, "truncated vocabulary: " + path);
        auto tab = line.find('\t');
        if (tab == std::string::npos) raise(ErrorKind::parse, "bad vocabulary line: " + path);
        std::string word = line.substr(0, tab);
        model.unigram_.push_back(std::stod(line.substr(tab + 1)));
        model.total_tokens_ += model.unigram_.back();
        model.vocab_ids_.emplace(word, model.vocab_.size());
        model.vocab_.push_back(std::move(word));
    }
    auto slurp = [&in, &path](std::unordered_map<std::uint64_t, double>& m) {
        std::size_t count = 0;
        in >> count;
        m.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t k;
            double v;
            if (!(in >> k >> v)) raise(ErrorKind::parse, "truncated counts: " + path);
            m.emplace(k, v);
        }
    };
    slurp(model.trigram_);
    slurp(model.trigram_ctx_);
    slurp(model.bigram_);
    slurp(model.bigram_ctx_);
    return model;
}

// ---------------------------------------------------------------------------

NgramScorer::NgramScorer(std::shared_ptr<const NgramLanguageModel> model, std::uint64_t seed,
                         std::string name)
    : model_(std::move(model)), seed_(seed), name_(std::move(name)) {
    if (!model_ || !model_->fitted())
        raise(ErrorKind::invalid_input, "ngram scorer needs a fitted model");
}

std::size_t NgramScorer::vocab_size() const { return model_->vocabulary().size(); }

std::pair<std::string, std::string> NgramScorer::context_at(const std::vector<WordSpan>& words,
                                                            std::size_t position) const {
    std::string prev2 = position >= 2 ? words[position - 2].surface : NgramLanguageModel::kBos;
    std::string prev1 = position >= 1 ? words[position - 1].surface : NgramLanguageModel::kBos;
    return {prev2, prev1};
}

std::vector<ScoredToken> NgramScorer::score_tokens(const std::string& text) const {
    WordSequence seq = segment_words(text);
    const std::size_t stride = model_->vocabulary().size() + 2;
    std::vector<ScoredToken> out;
    out.reserve(seq.n_words());
    for (std::size_t i = 0; i < seq.n_words(); ++i) {
        auto [prev2, prev1] = context_at(seq.words, i);
        std::size_t c2 = model_->context_id(prev2);
        std::size_t c1 = model_->context_id(prev1);
        std::size_t w = model_->vocab_index(seq.words[i].surface);
        std::size_t w_key = w == NgramLanguageModel::npos ? stride - 1 : w;
        std::uint64_t key = (static_cast<std::uint64_t>(c2) * stride + c1) * stride + w_key;

        double log_p = 0.0, rank = 1.0;
        bool cached = false;
        {
            std::lock_guard lock(cache_mutex_);
            auto hit = cache_.find(key);
            if (hit != cache_.end()) {
                log_p = hit->second.first;
                rank = hit->second.second;
                cached = true;
            }
        }
        if (!cached) {
            std::size_t w_id = w == NgramLanguageModel::npos ? model_->vocabulary().size() + 1 : w;
            double p = model_->prob_ids(c2, c1, w_id);
            log_p = std::log(p);
            std::size_t above = 0, ties_before = 0;
            for (std::size_t v = 0; v < model_->vocabulary().size(); ++v) {
                double q = model_->prob_ids(c2, c1, v);
                if (q > p) ++above;
                else if (q == p && v < w) ++ties_before;  // unknown words sort last
            }
            rank = static_cast<double>(1 + above + ties_before);
            std::lock_guard lock(cache_mutex_);
            if (cache_.size() > 4'000'000) cache_.clear();
            cache_.emplace(key, std::make_pair(log_p, rank));
        }

        ScoredToken token;
        token.text = seq.words[i].surface;
        token.start = seq.words[i].start;
        token.end = seq.words[i].end;
        token.log_prob = log_p;
        token.rank = rank;
        out.push_back(std::move(token));
    }
    return out;
}

std::vector<SampledToken> NgramScorer::sample_alternatives(const std::string& text,
                                                           std::size_t position,
                                                           std::size_t n) const {
    WordSequence seq = segment_words(text);
    if (position >= seq.n_words())
        raise(ErrorKind::invalid_input, "sample position out of range");
    auto [prev2, prev1] = context_at(seq.words, position);
    std::vector<double> probs = model_->conditional(prev2, prev1);
    double total = 0.0;
    for (double p : probs) total += p;

    std::uint64_t state = mix64(seed_ ^ mix64(hash_text(text) + position * 0x9E37u));
    std::vector<SampledToken> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = unit_double(state) * total;
        double acc = 0.0;
        std::size_t chosen = probs.size() - 1;
        for (std::size_t v = 0; v < probs.size(); ++v) {
            acc += probs[v];
            if (u < acc) {
                chosen = v;
                break;
            }
        }
        out.push_back({model_->vocabulary()[chosen], std::log(probs[chosen])});
    }
    return out;
}

std::vector<SampledToken> NgramScorer::enumerate_alternatives(const std::string& text,
                                                              std::size_t position) const {
    WordSequence seq = segment_words(text);
    if (position >= seq.n_words())
        raise(ErrorKind::invalid_input, "enumerate position out of range");
    auto [prev2, prev1] = context_at(seq.words, position);
    std::vector<double> probs = model_->conditional(prev2, prev1);
    std::vector<SampledToken> out;
    out.reserve(probs.size());
    for (std::size_t v = 0; v < probs.size(); ++v)
        out.push_back({model_->vocabulary()[v], std::log(probs[v])});
    return out;
}

std::vector<std::string> NgramScorer::greedy_continuation(
    const std::vector<std::string>& prefix_words, std::size_t n_words) const {
    std::vector<std::string> words = prefix_words;
    for (std::size_t i = 0; i < n_words; ++i) {
        std::string prev2 =
            words.size() >= 2 ? words[words.size() - 2] : std::string(NgramLanguageModel::kBos);
        std::string prev1 = words.empty() ? std::string(NgramLanguageModel::kBos) : words.back();
        std::vector<double> probs = model_->conditional(prev2, prev1);
        std::size_t best = 0;
        for (std::size_t v = 1; v < probs.size(); ++v)
            if (probs[v] > probs[best]) best = v;
        words.push_back(model_->vocabulary()[best]);
    }
    return words;
}

NgramInfiller::NgramInfiller(std::shared_ptr<const NgramLanguageModel> model, std::uint64_t seed)
    : model_(std::move(model)), seed_(seed) {
    if (!model_ || !model_->fitted())
        raise(ErrorKind::invalid_input, "ngram infiller needs a fitted model");
}

std::string NgramInfiller::infill(const std::string& text,
                                  const std::vector<WordSpan>& masked) const {
    std::uint64_t state = mix64(seed_ ^ mix64(hash_text(text) + (calls_++) * 0x51ABu));
    std::string out;
    out.reserve(text.size());
    std::size_t cursor = 0;
    std::string prev2 = NgramLanguageModel::kBos, prev1 = NgramLanguageModel::kBos;

    auto track_context = [&](const std::string& chunk) {
        WordSequence seq;
        if (!chunk.empty()) {
            seq = segment_words(chunk);
            for (const WordSpan& w : seq.words) {
                prev2 = prev1;
                prev1 = w.surface;
            }
        }
    };

    for (const WordSpan& span : masked) {
        if (span.start < cursor || span.end > text.size() || span.start >= span.end)
            raise(ErrorKind::invalid_input, "masked spans must be ordered and in range");
        std::string before = text.substr(cursor, span.start - cursor);
        out.append(before);
        track_context(before);

        std::size_t n_words = 1;
        {
            std::string masked_text = text.substr(span.start, span.end - span.start);
            WordSequence masked_seq = segment_words(masked_text);
            n_words = std::max<std::size_t>(1, masked_seq.n_words());
        }
        for (std::size_t k = 0; k < n_words; ++k) {
            std::vector<double> probs = model_->conditional(prev2, prev1);
            double total = 0.0;
            for (double p : probs) total += p;
            double u = unit_double(state) * total;
            double acc = 0.0;
            std::size_t chosen = probs.size() - 1;
            for (std::size_t v = 0; v < probs.size(); ++v) {
                acc += probs[v];
                if (u < acc) {
                    chosen = v;
                    break;
                }
            }
            if (k > 0) out.push_back(' ');
            out.append(model_->vocabulary()[chosen]);
            prev2 = prev1;
            prev1 = model_->vocabulary()[chosen];
        }
        cursor = span.end;
    }
    out.append(text, cursor, text.size() - cursor);
    return out;
}

}  // namespace raft
