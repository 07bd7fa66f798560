#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "geomet/embedding.hpp"

namespace geomet {

struct SimilarityPair {
  std::string word1;
  std::string word2;
  double human_score;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityPair> rows;
};

struct AnalogyQuestion {
  std::string a;
  std::string b;
  std::string c;
  std::string expected;
  double gold_score = 0.0;  // only meaningful in scored datasets
};

struct AnalogyDataset {
  std::string name;
  std::vector<AnalogyQuestion> rows;
  bool scored = false;
};

struct EvalReport {
  std::string dataset;
  std::string metric;
  double score = 0.0;
  std::size_t n_total = 0;
  std::size_t n_used = 0;
  double coverage = 0.0;  // n_used / n_total
};

/// cos(u, v); 0 when either vector is zero.
double cosine_similarity(const Vector& u, const Vector& v);

/// Spearman rank correlation: Pearson correlation of tie-averaged ranks.
/// Throws DataError for constant inputs or fewer than two observations.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

/// Spearman correlation between per-pair cosine similarities and human
/// scores. Pairs with an out-of-vocabulary word are skipped and counted.
EvalReport eval_similarity(const EmbeddingTable& t, const SimilarityDataset& ds);

/// 3CosAdd: the vocabulary word (excluding a, b, c) whose embedding has the
/// highest cosine similarity with vec(b) - vec(a) + vec(c); ties resolve to
/// the lowest vocabulary index. Throws DataError on an OOV query token.
std::string answer_analogy(const EmbeddingTable& t, const std::string& a,
                           const std::string& b, const std::string& c);

/// Unscored: fraction of fully in-vocabulary questions answered exactly.
/// Scored: Spearman correlation between cos(b - a + c, expected) and the
/// dataset's gold scores. OOV questions are skipped and counted.
EvalReport eval_analogy(const EmbeddingTable& t, const AnalogyDataset& ds,
                        bool scored);

/// Dataset files are discovered by suffix: `.sim.tsv` (word1, word2, score),
/// `.ana.tsv` (a, b, c, answer), `.anascored.tsv` (a, b, c, d, score), all
/// tab-separated.
struct DatasetFile {
  enum class Kind { kSimilarity, kAnalogy, kScoredAnalogy };
  std::string path;
  Kind kind;
};

/// Matching files in `dir`, sorted by filename. Throws DataError when none
/// are found.
std::vector<DatasetFile> discover_datasets(const std::string& dir);

using Dataset = std::variant<SimilarityDataset, AnalogyDataset>;

SimilarityDataset load_similarity_dataset(const std::string& path);
AnalogyDataset load_analogy_dataset(const std::string& path, bool scored);
Dataset load_dataset(const DatasetFile& file);

/// One evaluated dataset. Datasets with too little vocabulary coverage to
/// produce a score are reported with usable = false instead of failing the
/// whole run.
struct DirectoryEvalRow {
  EvalReport report;
  bool usable = true;
  std::string error;
};

DirectoryEvalRow evaluate_loaded(const EmbeddingTable& t, const Dataset& ds);

/// Discovers, loads and evaluates every dataset in `dir`.
std::vector<DirectoryEvalRow> evaluate_directory(const EmbeddingTable& t,
                                                 const std::string& dir);

}  // namespace geomet
