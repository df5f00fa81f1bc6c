#include "raft/attack/attack.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

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

}  // namespace

AttackRecord raft_attack(const WordSequence& seq, const Detector& detector,
                         const ImportanceRanking& ranking, CandidateGenerator& generator,
                         const PosTagger* tagger, const AttackConfig& config,
                         const std::string& sample_id, const std::string& ranker_name) {
    config.validate();
    if (ranking.scores.size() != seq.n_words())
        raise(ErrorKind::validation, "ranking was not computed on this sequence");

    const auto started = std::chrono::steady_clock::now();

    AttackRecord record;
    record.sample_id = sample_id;
    record.original_text = seq.text;
    record.detector_name = detector.name();
    record.ranker_name = ranker_name.empty() ? to_string(ranking.mode) : ranker_name;
    record.config_snapshot = config;

    std::vector<std::size_t> selected = ranking.selected;
    if (selected.empty()) {
        ImportanceRanking scratch = ranking;
        selected = select_top_k(scratch, config.mask_rate, seq.n_words());
    }

    record.score_before = detector.score(seq.text);

    WordSequence current = seq;
    double current_score = record.score_before;
    std::uint64_t rng = mix64(config.seed ^ hash_text(seq.text));

    auto finish = [&](double score_after) {
        record.perturbed_text = current.text;
        record.score_after = score_after;
        record.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return record;
    };

    for (std::size_t word_index : selected) {
        if (config.threshold && current_score <= *config.threshold) break;
        if (word_index >= current.n_words())
            raise(ErrorKind::validation, "selected index out of range");

        const std::string original_surface = current.words[word_index].surface;

        std::vector<std::string> raw;
        try {
            raw = generator.generate(current, word_index, config.num_candidates);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::backend || e.kind() == ErrorKind::capability) {
                record.skipped_word_indices.push_back(word_index);  // generator gave up; word keeps no budget
                continue;
            }
            throw;
        }

        CandidateSet candidates = build_candidate_set(current, word_index, std::move(raw),
                                                      generator.kind(), tagger,
                                                      config.pos_filter, config.coarse_pos);
        if (candidates.pos_filtered.empty()) {
            record.skipped_word_indices.push_back(word_index);
            continue;
        }

        if (config.selection_mode == SelectionMode::greedy) {
            double best_score = current_score;
            std::string best_candidate;
            std::string best_text;
            for (const std::string& candidate : candidates.pos_filtered) {
                std::string substituted = apply_replacement(current, word_index, candidate);
                double score;
                try {
                    score = detector.score(substituted);
                } catch (const std::exception& e) {
                    AttackRecord partial = record;
                    partial.perturbed_text = current.text;
                    partial.score_after = current_score;
                    throw AttackAborted(
                        std::string("detector failed mid-attack: ") + e.what(), std::move(partial));
                }
                if (score < best_score) {  // strict: the original wins ties
                    best_score = score;
                    best_candidate = candidate;
                    best_text = std::move(substituted);
                }
            }
            if (!best_candidate.empty()) {
                WordSequence next = segment_words(best_text);
                if (next.n_words() != current.n_words())
                    raise(ErrorKind::validation,
                          "substitution changed the word count for '" + best_candidate + "'");
                current = std::move(next);
                current_score = best_score;
                Substitution sub;
                sub.word_index = word_index;
                sub.original = original_surface;
                sub.replacement = best_candidate;
                sub.candidates_considered = candidates.pos_filtered;
                sub.detector_score_after = best_score;
                record.substitutions.push_back(std::move(sub));
            }
        } else {
            rng = mix64(rng);
            std::size_t pick = static_cast<std::size_t>(rng % candidates.pos_filtered.size());
            const std::string& candidate = candidates.pos_filtered[pick];
            std::string substituted = apply_replacement(current, word_index, candidate);
            WordSequence next = segment_words(substituted);
            if (next.n_words() != current.n_words())
                raise(ErrorKind::validation,
                      "substitution changed the word count for '" + candidate + "'");
            current = std::move(next);
            double score;
            try {
                score = detector.score(current.text);  // trace only; selection ignored it
            } catch (const std::exception& e) {
                AttackRecord partial = record;
                partial.perturbed_text = current.text;
                partial.score_after = current_score;
                throw AttackAborted(std::string("detector failed mid-attack: ") + e.what(),
                                    std::move(partial));
            }
            current_score = score;
            Substitution sub;
            sub.word_index = word_index;
            sub.original = original_surface;
            sub.replacement = candidate;
            sub.candidates_considered = candidates.pos_filtered;
            sub.detector_score_after = score;
            record.substitutions.push_back(std::move(sub));
        }
    }

    return finish(current_score);
}

BatchResult attack_dataset(const std::vector<TextSample>& samples, const AttackConfig& config,
                           const Detector& detector, const RankerBinding& ranker,
                           CandidateGenerator& generator, const PosTagger* tagger,
                           int worker_count) {
    config.validate();
    if (!ranker.rank) raise(ErrorKind::config, "ranker binding has no function");
    if (worker_count < 1) worker_count = 1;

    BatchResult result;
    if (samples.empty()) return result;

    std::vector<std::optional<AttackRecord>> slots(samples.size());
    std::mutex failures_mutex;
    std::atomic<std::size_t> cursor{0};

    auto work = [&]() {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= samples.size()) return;
            const TextSample& sample = samples[i];
            try {
                WordSequence seq = segment_words(sample.machine_text);
                ImportanceRanking ranking = ranker.rank(seq);
                select_top_k(ranking, config.mask_rate, seq.n_words());
                slots[i] = raft_attack(seq, detector, ranking, generator, tagger, config,
                                       sample.id, ranker.name);
            } catch (const std::exception& e) {
                std::lock_guard lock(failures_mutex);
                result.failures.push_back({sample.id, e.what()});
            }
        }
    };

    if (worker_count == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(worker_count));
        for (int w = 0; w < worker_count; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (auto& slot : slots)
        if (slot) result.records.push_back(std::move(*slot));

    if (result.failures.size() * 2 > samples.size())
        raise(ErrorKind::batch,
              std::to_string(result.failures.size()) + " of " + std::to_string(samples.size()) +
                  " samples failed");
    return result;
}

}  // namespace raft
