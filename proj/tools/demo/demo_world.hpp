#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "raft/backends/ngram.hpp"
#include "raft/backends/tagger.hpp"
#include "raft/backends/wordvec.hpp"
#include "raft/core/types.hpp"

namespace raft::demo {

/// Knobs for the synthetic news-style world. Machine passages are
/// sampled at low temperature (model-typical word choices), human
/// passages at high temperature (diverse word choices), both over the
/// same templated grammar the training corpus comes from.
struct DemoOptions {
    std::size_t n_pairs = 24;
    std::size_t corpus_passages = 1500;
    std::size_t sentences_per_passage = 14;
    double machine_temperature = 0.35;
    double human_temperature = 1.30;
    double corpus_noise_rate = 0.06;  // cross-cluster slot fills in the corpus
    double human_noise_rate = 0.02;
    std::uint64_t seed = 7;
    std::size_t vector_dim = 24;
};

/// A self-contained evaluation world: paired dataset, a fitted trigram
/// model over the same domain, a full-coverage POS lexicon, and word
/// vectors whose neighborhoods are POS-consistent near-synonyms.
struct DemoWorld {
    std::vector<std::string> corpus;
    std::vector<TextSample> dataset;
    std::shared_ptr<NgramLanguageModel> model;
    std::map<std::string, std::string> lexicon;
    std::vector<std::string> vector_words;
    std::vector<float> vector_matrix;
    std::size_t vector_dim = 0;

    std::shared_ptr<DenseWordVectors> make_vectors() const;
    LexiconPosTagger make_tagger() const;
};

DemoWorld build_demo_world(const DemoOptions& options = {});

/// Writes dataset.jsonl, vectors.txt, lexicon.txt, ngram.model and a
/// ready-to-use config.json into `dir`.
void write_demo_files(const DemoWorld& world, const std::string& dir);

}  // namespace raft::demo
