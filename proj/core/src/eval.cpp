#include "geomet/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "geomet/errors.hpp"

namespace geomet {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSimSuffix = ".sim.tsv";
constexpr const char* kAnaSuffix = ".ana.tsv";
constexpr const char* kScoredSuffix = ".anascored.tsv";

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string dataset_name(const std::string& path, const std::string& suffix) {
  std::string name = fs::path(path).filename().string();
  return name.substr(0, name.size() - suffix.size());
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_score(const std::string& field, const std::string& path,
                   std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw IoError(path + ":" + std::to_string(line_no) +
                  ": unparseable score '" + field + "'");
  return v;
}

// Calls fn(fields, line_no) for every nonempty line.
template <typename Fn>
void for_each_tsv_row(const std::string& path, std::size_t expect_fields, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != expect_fields)
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(expect_fields) + " tab-separated fields, found " +
                    std::to_string(fields.size()));
    fn(fields, line_no);
  }
  if (in.bad()) throw IoError("read failure on " + path);
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx;
    double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DataError("correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Lowest-index argmax of cosine(target, column j), skipping query tokens.
// `norms` caches the column norms.
Index scan_analogy(const EmbeddingTable& t, const Vector& norms,
                   const Vector& target, const std::string& a,
                   const std::string& b, const std::string& c) {
  const double target_norm = target.norm();
  double best = -std::numeric_limits<double>::infinity();
  Index best_idx = -1;
  for (Index j = 0; j < t.size(); ++j) {
    const std::string& w = t.words()[static_cast<std::size_t>(j)];
    if (w == a || w == b || w == c) continue;
    double denom = norms(j) * target_norm;
    double score = denom == 0.0 ? 0.0 : t.vectors().col(j).dot(target) / denom;
    if (score > best) {
      best = score;
      best_idx = j;
    }
  }
  return best_idx;
}

Vector column_norms(const EmbeddingTable& t) {
  return t.vectors().colwise().norm();
}

}  // namespace

double cosine_similarity(const Vector& u, const Vector& v) {
  double denom = u.norm() * v.norm();
  return denom == 0.0 ? 0.0 : u.dot(v) / denom;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("spearman inputs differ in length");
  if (xs.size() < 2) throw DataError("spearman needs at least two observations");
  return pearson(average_ranks(xs), average_ranks(ys));
}

EvalReport eval_similarity(const EmbeddingTable& t, const SimilarityDataset& ds) {
  std::vector<double> human;
  std::vector<double> model;
  for (const SimilarityPair& row : ds.rows) {
    auto i = t.find(row.word1);
    auto j = t.find(row.word2);
    if (!i || !j) continue;
    human.push_back(row.human_score);
    model.push_back(cosine_similarity(t.vectors().col(*i), t.vectors().col(*j)));
  }
  EvalReport report;
  report.dataset = ds.name;
  report.metric = "spearman";
  report.n_total = ds.rows.size();
  report.n_used = model.size();
  report.coverage = report.n_total == 0
                        ? 0.0
                        : static_cast<double>(report.n_used) /
                              static_cast<double>(report.n_total);
  if (report.n_used < 2)
    throw DataError("fewer than 2 usable pairs in dataset " + ds.name);
  report.score = spearman(model, human);
  return report;
}

std::string answer_analogy(const EmbeddingTable& t, const std::string& a,
                           const std::string& b, const std::string& c) {
  for (const std::string* w : {&a, &b, &c})
    if (!t.contains(*w))
      throw DataError("out-of-vocabulary query token: '" + *w + "'");
  Vector target = t.vectors().col(*t.find(b)) - t.vectors().col(*t.find(a)) +
                  t.vectors().col(*t.find(c));
  Vector norms = column_norms(t);
  Index best = scan_analogy(t, norms, target, a, b, c);
  if (best < 0)
    throw DataError("vocabulary has no candidate words besides the query");
  return t.words()[static_cast<std::size_t>(best)];
}

EvalReport eval_analogy(const EmbeddingTable& t, const AnalogyDataset& ds,
                        bool scored) {
  EvalReport report;
  report.dataset = ds.name;
  report.n_total = ds.rows.size();

  Vector norms = column_norms(t);
  if (!scored) {
    std::size_t used = 0;
    std::size_t correct = 0;
    for (const AnalogyQuestion& q : ds.rows) {
      auto ia = t.find(q.a);
      auto ib = t.find(q.b);
      auto ic = t.find(q.c);
      if (!ia || !ib || !ic || !t.contains(q.expected)) continue;
      ++used;
      Vector target =
          t.vectors().col(*ib) - t.vectors().col(*ia) + t.vectors().col(*ic);
      Index best = scan_analogy(t, norms, target, q.a, q.b, q.c);
      if (best >= 0 && t.words()[static_cast<std::size_t>(best)] == q.expected)
        ++correct;
    }
    report.metric = "3cosadd-accuracy";
    report.n_used = used;
    if (used == 0)
      throw DataError("zero usable questions in dataset " + ds.name);
    report.score = static_cast<double>(correct) / static_cast<double>(used);
  } else {
    std::vector<double> gold;
    std::vector<double> model;
    for (const AnalogyQuestion& q : ds.rows) {
      auto ia = t.find(q.a);
      auto ib = t.find(q.b);
      auto ic = t.find(q.c);
      auto id = t.find(q.expected);
      if (!ia || !ib || !ic || !id) continue;
      Vector target =
          t.vectors().col(*ib) - t.vectors().col(*ia) + t.vectors().col(*ic);
      model.push_back(cosine_similarity(target, t.vectors().col(*id)));
      gold.push_back(q.gold_score);
    }
    report.metric = "analogy-spearman";
    report.n_used = model.size();
    if (report.n_used == 0)
      throw DataError("zero usable questions in dataset " + ds.name);
    report.score = spearman(model, gold);
  }
  report.coverage = report.n_total == 0
                        ? 0.0
                        : static_cast<double>(report.n_used) /
                              static_cast<double>(report.n_total);
  return report;
}

std::vector<DatasetFile> discover_datasets(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<DatasetFile> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (ends_with(name, kScoredSuffix))
      files.push_back({entry.path().string(), DatasetFile::Kind::kScoredAnalogy});
    else if (ends_with(name, kAnaSuffix))
      files.push_back({entry.path().string(), DatasetFile::Kind::kAnalogy});
    else if (ends_with(name, kSimSuffix))
      files.push_back({entry.path().string(), DatasetFile::Kind::kSimilarity});
  }
  std::sort(files.begin(), files.end(),
            [](const DatasetFile& a, const DatasetFile& b) { return a.path < b.path; });
  if (files.empty()) throw DataError("no datasets found in " + dir);
  return files;
}

SimilarityDataset load_similarity_dataset(const std::string& path) {
  SimilarityDataset ds;
  ds.name = ends_with(path, kSimSuffix) ? dataset_name(path, kSimSuffix)
                                        : fs::path(path).filename().string();
  for_each_tsv_row(path, 3, [&](const std::vector<std::string>& f, std::size_t ln) {
    ds.rows.push_back({f[0], f[1], parse_score(f[2], path, ln)});
  });
  return ds;
}

AnalogyDataset load_analogy_dataset(const std::string& path, bool scored) {
  AnalogyDataset ds;
  ds.scored = scored;
  const char* suffix = scored ? kScoredSuffix : kAnaSuffix;
  ds.name = ends_with(path, suffix) ? dataset_name(path, suffix)
                                    : fs::path(path).filename().string();
  if (scored) {
    for_each_tsv_row(path, 5, [&](const std::vector<std::string>& f, std::size_t ln) {
      ds.rows.push_back({f[0], f[1], f[2], f[3], parse_score(f[4], path, ln)});
    });
  } else {
    for_each_tsv_row(path, 4, [&](const std::vector<std::string>& f, std::size_t) {
      ds.rows.push_back({f[0], f[1], f[2], f[3], 0.0});
    });
  }
  return ds;
}

Dataset load_dataset(const DatasetFile& file) {
  switch (file.kind) {
    case DatasetFile::Kind::kSimilarity:
      return load_similarity_dataset(file.path);
    case DatasetFile::Kind::kAnalogy:
      return load_analogy_dataset(file.path, false);
    case DatasetFile::Kind::kScoredAnalogy:
      return load_analogy_dataset(file.path, true);
  }
  throw std::logic_error("unreachable dataset kind");
}

namespace {

std::size_t count_usable(const EmbeddingTable& t, const SimilarityDataset& ds) {
  std::size_t used = 0;
  for (const auto& row : ds.rows)
    if (t.contains(row.word1) && t.contains(row.word2)) ++used;
  return used;
}

std::size_t count_usable(const EmbeddingTable& t, const AnalogyDataset& ds) {
  std::size_t used = 0;
  for (const auto& q : ds.rows)
    if (t.contains(q.a) && t.contains(q.b) && t.contains(q.c) &&
        t.contains(q.expected))
      ++used;
  return used;
}

DirectoryEvalRow skipped_row(std::string name, std::string metric,
                             std::size_t n_total, std::size_t n_used,
                             std::string error) {
  DirectoryEvalRow row;
  row.report.dataset = std::move(name);
  row.report.metric = std::move(metric);
  row.report.score = std::numeric_limits<double>::quiet_NaN();
  row.report.n_total = n_total;
  row.report.n_used = n_used;
  row.report.coverage =
      n_total == 0 ? 0.0
                   : static_cast<double>(n_used) / static_cast<double>(n_total);
  row.usable = false;
  row.error = std::move(error);
  return row;
}

}  // namespace

DirectoryEvalRow evaluate_loaded(const EmbeddingTable& t, const Dataset& ds) {
  if (const auto* sim = std::get_if<SimilarityDataset>(&ds)) {
    try {
      return {eval_similarity(t, *sim), true, ""};
    } catch (const DataError& e) {
      return skipped_row(sim->name, "spearman", sim->rows.size(),
                         count_usable(t, *sim), e.what());
    }
  }
  const auto& ana = std::get<AnalogyDataset>(ds);
  try {
    return {eval_analogy(t, ana, ana.scored), true, ""};
  } catch (const DataError& e) {
    return skipped_row(ana.name,
                       ana.scored ? "analogy-spearman" : "3cosadd-accuracy",
                       ana.rows.size(), count_usable(t, ana), e.what());
  }
}

std::vector<DirectoryEvalRow> evaluate_directory(const EmbeddingTable& t,
                                                 const std::string& dir) {
  std::vector<DirectoryEvalRow> rows;
  for (const DatasetFile& file : discover_datasets(dir))
    rows.push_back(evaluate_loaded(t, load_dataset(file)));
  return rows;
}

}  // namespace geomet
