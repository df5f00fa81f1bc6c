#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "raft/backends/contracts.hpp"

namespace raft {

/// In-memory word-vector table with brute-force cosine neighbors.
/// Vectors are unit-normalized at construction. Loadable from the text
/// format (one "word v1 ... vd" line per entry); a binary sidecar cache
/// `<path>.cache` is written on first load and reused while fresh.
class DenseWordVectors final : public WordVectorIndex {
public:
    DenseWordVectors(std::vector<std::string> words, std::vector<float> matrix,
                     std::size_t dimension, std::string name = "word-vectors");

    static DenseWordVectors load_text(const std::string& path);

    std::vector<Neighbor> nearest(const std::string& word, std::size_t n) const override;
    bool contains(const std::string& word) const override;
    std::string name() const override { return name_; }

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return words_.size(); }
    std::optional<std::vector<double>> vector_of(const std::string& word) const;

    void save_text(const std::string& path) const;

private:
    std::vector<std::string> words_;
    std::vector<float> matrix_;  // row-major, unit rows
    std::size_t dimension_;
    std::string name_;
    std::unordered_map<std::string, std::size_t> ids_;
    std::unordered_map<std::string, std::size_t> lower_ids_;

    std::size_t find(const std::string& word) const;  // exact, then lowercase
};

/// Bag-of-vectors sentence embedder: the normalized mean of the word
/// vectors of a text's words. Out-of-vocabulary words are skipped.
class WordVectorEmbedder final : public TextEmbedder {
public:
    explicit WordVectorEmbedder(std::shared_ptr<const DenseWordVectors> vectors);

    std::vector<double> embed(const std::string& text) const override;
    std::size_t dimension() const override;
    std::string name() const override { return "wordvec-mean"; }

private:
    std::shared_ptr<const DenseWordVectors> vectors_;
};

}  // namespace raft
