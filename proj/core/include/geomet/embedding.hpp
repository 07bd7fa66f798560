#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geomet/matrix.hpp"

namespace geomet {

/// Ordered vocabulary plus a d x n matrix whose column i holds the embedding
/// of words()[i]. Tokens are unique, nonempty and free of whitespace; every
/// entry is finite; n >= 1 and d >= 1.
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> words, Matrix vectors);

  Index dim() const { return vectors_.rows(); }
  Index size() const { return vectors_.cols(); }
  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }

  /// Column index of `word`, or nullopt when out of vocabulary.
  std::optional<Index> find(const std::string& word) const;
  bool contains(const std::string& word) const { return find(word).has_value(); }

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  std::unordered_map<std::string, Index> index_;
};

struct PreprocessOptions {
  bool unit_normalize = true;
  bool mean_center = false;
};

/// Two embedding tables restricted to a shared vocabulary, word-for-word in
/// the same order.
class AlignedPair {
 public:
  AlignedPair(EmbeddingTable x, EmbeddingTable z);

  const std::vector<std::string>& words() const { return x_.words(); }
  const EmbeddingTable& x() const { return x_; }
  const EmbeddingTable& z() const { return z_; }
  Index dim() const { return x_.dim(); }
  Index size() const { return x_.size(); }

 private:
  EmbeddingTable x_;
  EmbeddingTable z_;
};

struct LoadStats {
  std::size_t duplicates_dropped = 0;
};

/// Reads a word2vec text file: an optional "n d" header line followed by one
/// "token v1 ... vd" line per word, fields separated by ASCII spaces. The
/// first occurrence of a duplicate token wins; later ones are dropped and
/// tallied in `stats`. `max_words` caps the number of words kept, in file
/// order. A header, when present and the file is read to the end, is checked
/// against the actual line count and dimension.
EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<std::size_t> max_words = std::nullopt,
                               LoadStats* stats = nullptr);

/// Writes word2vec text format with >= 9 significant digits per value.
void save_embeddings(const EmbeddingTable& table, const std::string& path,
                     bool with_header = true);

/// Restricts both tables to their common vocabulary, ordered as in `a`.
/// Throws DataError when dimensions differ or the intersection is empty.
AlignedPair intersect_vocab(const EmbeddingTable& a, const EmbeddingTable& b);

/// Mean-centers per dimension, then rescales each column to unit norm,
/// according to `opts` (in that order). Zero columns pass through unchanged
/// and are tallied in `zero_columns`.
EmbeddingTable preprocess(const EmbeddingTable& table,
                          const PreprocessOptions& opts,
                          std::size_t* zero_columns = nullptr);

}  // namespace geomet
