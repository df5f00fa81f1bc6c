#include "raft/backends/wordvec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "raft/core/segment.hpp"

namespace raft {

namespace {

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

constexpr std::uint32_t kCacheMagic = 0x52465756;  // "RFWV"

}  // namespace

DenseWordVectors::DenseWordVectors(std::vector<std::string> words, std::vector<float> matrix,
                                   std::size_t dimension, std::string name)
    : words_(std::move(words)), matrix_(std::move(matrix)), dimension_(dimension),
      name_(std::move(name)) {
    if (dimension_ == 0) raise(ErrorKind::validation, "word vectors need dimension > 0");
    if (matrix_.size() != words_.size() * dimension_)
        raise(ErrorKind::validation, "word vector matrix shape mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) {
        float* row = matrix_.data() + i * dimension_;
        double norm = 0.0;
        for (std::size_t d = 0; d < dimension_; ++d) norm += double(row[d]) * row[d];
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (std::size_t d = 0; d < dimension_; ++d)
                row[d] = static_cast<float>(row[d] / norm);
        ids_.emplace(words_[i], i);
        lower_ids_.try_emplace(lower_ascii(words_[i]), i);
    }
}

std::size_t DenseWordVectors::find(const std::string& word) const {
    auto it = ids_.find(word);
    if (it != ids_.end()) return it->second;
    auto lower = lower_ids_.find(lower_ascii(word));
    if (lower != lower_ids_.end()) return lower->second;
    return static_cast<std::size_t>(-1);
}

bool DenseWordVectors::contains(const std::string& word) const {
    return find(word) != static_cast<std::size_t>(-1);
}

std::optional<std::vector<double>> DenseWordVectors::vector_of(const std::string& word) const {
    std::size_t id = find(word);
    if (id == static_cast<std::size_t>(-1)) return std::nullopt;
    const float* row = matrix_.data() + id * dimension_;
    return std::vector<double>(row, row + dimension_);
}

std::vector<WordVectorIndex::Neighbor> DenseWordVectors::nearest(const std::string& word,
                                                                 std::size_t n) const {
    std::size_t id = find(word);
    if (id == static_cast<std::size_t>(-1)) return {};
    const float* query = matrix_.data() + id * dimension_;
    std::string query_lower = lower_ascii(word);

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (i == id || lower_ascii(words_[i]) == query_lower) continue;  // never the query itself
        const float* row = matrix_.data() + i * dimension_;
        double dot = 0.0;
        for (std::size_t d = 0; d < dimension_; ++d) dot += double(query[d]) * row[d];
        scored.emplace_back(dot, i);
    }
    std::size_t take = std::min(n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;  // deterministic tie order
                      });
    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.push_back({words_[scored[i].second], scored[i].first});
    return out;
}

void DenseWordVectors::save_text(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::io, "cannot write vectors file: " + path);
    out.precision(8);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        out << words_[i];
        const float* row = matrix_.data() + i * dimension_;
        for (std::size_t d = 0; d < dimension_; ++d) out << ' ' << row[d];
        out << '\n';
    }
}

namespace {

bool load_cache(const std::string& cache_path, std::vector<std::string>& words,
                std::vector<float>& matrix, std::size_t& dimension) {
    std::ifstream in(cache_path, std::ios::binary);
    if (!in) return false;
    std::uint32_t magic = 0, dim = 0;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || magic != kCacheMagic || dim == 0) return false;
    words.resize(count);
    matrix.resize(count * dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof len);
        if (!in || len > 4096) return false;
        words[i].resize(len);
        in.read(words[i].data(), len);
        in.read(reinterpret_cast<char*>(matrix.data() + i * dim),
                static_cast<std::streamsize>(dim * sizeof(float)));
        if (!in) return false;
    }
    dimension = dim;
    return true;
}

void write_cache(const std::string& cache_path, const std::vector<std::string>& words,
                 const std::vector<float>& matrix, std::size_t dimension) {
    std::ofstream out(cache_path, std::ios::binary);
    if (!out) return;  // cache is best effort
    std::uint32_t magic = kCacheMagic, dim = static_cast<std::uint32_t>(dimension);
    std::uint64_t count = words.size();
    out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::uint32_t len = static_cast<std::uint32_t>(words[i].size());
        out.write(reinterpret_cast<const char*>(&len), sizeof len);
        out.write(words[i].data(), len);
        out.write(reinterpret_cast<const char*>(matrix.data() + i * dimension),
                  static_cast<std::streamsize>(dimension * sizeof(float)));
    }
}

}  // namespace

DenseWordVectors DenseWordVectors::load_text(const std::string& path) {
    namespace fs = std::filesystem;
    const std::string cache_path = path + ".cache";

    std::error_code ec;
    bool cache_fresh = false;
    if (fs::exists(cache_path, ec) && !ec) {
        auto text_time = fs::last_write_time(path, ec);
        auto cache_time = fs::last_write_time(cache_path, ec);
        cache_fresh = !ec && cache_time >= text_time;
    }
    if (cache_fresh) {
        std::vector<std::string> words;
        std::vector<float> matrix;
        std::size_t dimension = 0;
        if (load_cache(cache_path, words, matrix, dimension))
            return DenseWordVectors(std::move(words), std::move(matrix), dimension,
                                    fs::path(path).filename().string());
    }

    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open vectors file: " + path);
    std::vector<std::string> words;
    std::vector<float> matrix;
    std::size_t dimension = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        std::vector<float> row;
        float v = 0.0f;
        while (fields >> v) row.push_back(v);
        if (row.empty())
            raise(ErrorKind::parse,
                  "vectors line " + std::to_string(line_no) + ": no components");
        // a leading "count dim" header line (word2vec text format) has one component
        if (dimension == 0 && words.empty() && row.size() == 1) continue;
        if (dimension == 0) dimension = row.size();
        if (row.size() != dimension)
            raise(ErrorKind::parse,
                  "vectors line " + std::to_string(line_no) + ": inconsistent dimension");
        words.push_back(std::move(word));
        matrix.insert(matrix.end(), row.begin(), row.end());
    }
    if (words.empty()) raise(ErrorKind::parse, "vectors file has no entries: " + path);
    write_cache(cache_path, words, matrix, dimension);
    return DenseWordVectors(std::move(words), std::move(matrix), dimension,
                            fs::path(path).filename().string());
}

WordVectorEmbedder::WordVectorEmbedder(std::shared_ptr<const DenseWordVectors> vectors)
    : vectors_(std::move(vectors)) {
    if (!vectors_) raise(ErrorKind::invalid_input, "embedder needs a vector table");
}

std::size_t WordVectorEmbedder::dimension() const { return vectors_->dimension(); }

std::vector<double> WordVectorEmbedder::embed(const std::string& text) const {
    std::vector<double> mean(vectors_->dimension(), 0.0);
    WordSequence seq = segment_words(text);
    std::size_t known = 0;
    for (const WordSpan& w : seq.words) {
        auto vec = vectors_->vector_of(w.surface);
        if (!vec) continue;
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += (*vec)[d];
        ++known;
    }
    if (known == 0) return mean;  // zero vector; similarity is undefined downstream
    double norm = 0.0;
    for (double x : mean) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& x : mean) x /= norm;
    return mean;
}

}  // namespace raft
