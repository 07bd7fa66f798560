// Command-line front end: train alignment parameters, transform embedding
// pairs into meta-embeddings, and evaluate them on benchmark datasets.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geomet/embedding.hpp"
#include "geomet/errors.hpp"
#include "geomet/eval.hpp"
#include "geomet/meta.hpp"
#include "geomet/objective.hpp"
#include "geomet/params_io.hpp"
#include "geomet/solver.hpp"

namespace {

namespace fs = std::filesystem;
using namespace geomet;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct LoadFlags {
  std::size_t max_words = 0;  // 0 = unlimited
};

struct TrainFlags {
  std::string src_x;
  std::string src_z;
  std::string out;
  double reg_c = 1.0;
  int max_iters = 500;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
  bool unit_norm = true;
  bool mean_center = false;
  std::string trace_path;
  LoadFlags load;
};

struct TransformFlags {
  std::string params;
  std::string src_x;
  std::string src_z;
  std::string out;
  std::string mode = "geo-conc";
  bool renorm = false;
  LoadFlags load;
};

struct EvalFlags {
  std::string embeddings;
  std::string dataset_dir;
  std::string out;
  LoadFlags load;
};

struct PipelineFlags {
  TrainFlags train;
  std::string dataset_dir;
  std::string out_dir;
  std::string mode = "geo-conc";
  bool renorm = false;
};

std::optional<std::size_t> opt_words(const LoadFlags& f) {
  if (f.max_words == 0) return std::nullopt;
  return f.max_words;
}

EmbeddingTable load_table(const std::string& path, const LoadFlags& f) {
  LoadStats stats;
  EmbeddingTable t = load_embeddings(path, opt_words(f), &stats);
  if (stats.duplicates_dropped > 0)
    std::cerr << "warning: " << path << ": dropped " << stats.duplicates_dropped
              << " duplicate token(s)\n";
  return t;
}

EmbeddingTable preprocess_table(const EmbeddingTable& t, const std::string& label,
                                const PreprocessOptions& opts) {
  std::size_t zeros = 0;
  EmbeddingTable out = preprocess(t, opts, &zeros);
  if (zeros > 0)
    std::cerr << "warning: " << label << ": " << zeros
              << " zero column(s) left unnormalized\n";
  return out;
}

MetaMode parse_mode(const std::string& s) {
  auto mode = meta_mode_from_string(s);
  if (!mode)  // unreachable behind the CLI IsMember check
    throw std::invalid_argument("unknown meta mode: " + s);
  return *mode;
}

struct TrainedModel {
  AlignedPair pair;
  SolveResult result;
};

TrainedModel run_solve(const TrainFlags& f) {
  EmbeddingTable tx = load_table(f.src_x, f.load);
  EmbeddingTable tz = load_table(f.src_z, f.load);
  PreprocessOptions opts{f.unit_norm, f.mean_center};
  EmbeddingTable px = preprocess_table(tx, f.src_x, opts);
  EmbeddingTable pz = preprocess_table(tz, f.src_z, opts);
  AlignedPair pair = intersect_vocab(px, pz);

  GramCache cache = build_gram_cache(pair);
  SolverConfig cfg;
  cfg.reg_c = RegWeight(f.reg_c);
  cfg.max_iters = f.max_iters;
  cfg.grad_tol = f.grad_tol;
  cfg.seed = f.seed;
  SolveResult result = solve(cache, cfg);
  return {std::move(pair), std::move(result)};
}

ParamsFile params_from(const TrainFlags& f, const TrainedModel& model) {
  return make_params_file(model.result.point,
                          fs::path(f.src_x).filename().string(),
                          fs::path(f.src_z).filename().string(),
                          PreprocessOptions{f.unit_norm, f.mean_center}, f.reg_c,
                          model.result.trace.termination);
}

void print_solve_summary(const TrainedModel& model) {
  const SolveTrace& trace = model.result.trace;
  std::cout << "shared vocabulary: " << model.pair.size() << " words\n"
            << "iterations: " << trace.accepted_steps << "\n"
            << "final loss: " << format_double(trace.records.back().loss) << "\n"
            << "termination: " << to_string(trace.termination) << "\n";
}

int run_train(const TrainFlags& f) {
  TrainedModel model = run_solve(f);
  if (!f.trace_path.empty()) write_trace(model.result.trace, f.trace_path);
  save_params(params_from(f, model), f.out);
  print_solve_summary(model);
  std::cout << "params written to " << f.out << "\n";
  return kExitOk;
}

EmbeddingTable transform_pair(const ParamsFile& params, const AlignedPair& pair,
                              MetaMode mode, bool renorm) {
  if (pair.dim() != params.d)
    throw DataError("params dimension " + std::to_string(params.d) +
                    " does not match embedding dimension " +
                    std::to_string(pair.dim()));
  std::optional<LatentMap> map;
  if (mode == MetaMode::kGeoAvg || mode == MetaMode::kGeoConc)
    map = make_latent_map(to_product_point(params));
  EmbeddingTable meta = build_meta(pair, map, mode);
  if (renorm) meta = preprocess(meta, PreprocessOptions{true, false});
  return meta;
}

int run_transform(const TransformFlags& f) {
  MetaMode mode = parse_mode(f.mode);
  ParamsFile params = load_params(f.params);
  EmbeddingTable tx = load_table(f.src_x, f.load);
  EmbeddingTable tz = load_table(f.src_z, f.load);
  EmbeddingTable px = preprocess_table(tx, f.src_x, params.preprocess);
  EmbeddingTable pz = preprocess_table(tz, f.src_z, params.preprocess);
  AlignedPair pair = intersect_vocab(px, pz);

  EmbeddingTable meta = transform_pair(params, pair, mode, f.renorm);
  save_embeddings(meta, f.out, /*with_header=*/true);
  std::cout << "meta-embeddings (" << to_string(mode) << "): " << meta.size()
            << " words, dimension " << meta.dim() << ", written to " << f.out
            << "\n";
  return kExitOk;
}

void write_report_tsv(const std::vector<DirectoryEvalRow>& rows,
                      const std::string& path) {
  std::string buf = "dataset\tmetric\tscore\tn_total\tn_used\tcoverage\n";
  for (const DirectoryEvalRow& row : rows) {
    const EvalReport& r = row.report;
    buf += r.dataset;
    buf += '\t';
    buf += r.metric;
    buf += '\t';
    buf += row.usable ? format_double(r.score) : "NA";
    buf += '\t';
    buf += std::to_string(r.n_total);
    buf += '\t';
    buf += std::to_string(r.n_used);
    buf += '\t';
    buf += format_double(r.coverage);
    buf += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

void print_report(const std::vector<DirectoryEvalRow>& rows) {
  for (const DirectoryEvalRow& row : rows) {
    const EvalReport& r = row.report;
    std::cout << r.dataset << "  " << r.metric << "  "
              << (row.usable ? format_double(r.score) : "NA") << "  used "
              << r.n_used << "/" << r.n_total;
    if (!row.usable) std::cout << "  [skipped: " << row.error << "]";
    std::cout << "\n";
  }
}

int run_eval(const EvalFlags& f) {
  EmbeddingTable t = load_table(f.embeddings, f.load);
  std::vector<DirectoryEvalRow> rows = evaluate_directory(t, f.dataset_dir);
  write_report_tsv(rows, f.out);
  print_report(rows);
  return kExitOk;
}

int run_pipeline(const PipelineFlags& f) {
  MetaMode mode = parse_mode(f.mode);

  // Validate the datasets up front so a bad directory fails before training.
  std::vector<Dataset> datasets;
  for (const DatasetFile& file : discover_datasets(f.dataset_dir))
    datasets.push_back(load_dataset(file));

  TrainedModel model = run_solve(f.train);
  ParamsFile params = params_from(f.train, model);
  EmbeddingTable meta = transform_pair(params, model.pair, mode, f.renorm);

  std::vector<DirectoryEvalRow> rows;
  rows.reserve(datasets.size());
  for (const Dataset& ds : datasets) rows.push_back(evaluate_loaded(meta, ds));

  fs::create_directories(f.out_dir);
  fs::path out_dir(f.out_dir);
  if (!f.train.trace_path.empty())
    write_trace(model.result.trace, f.train.trace_path);
  save_params(params, (out_dir / "params.txt").string());
  save_embeddings(meta, (out_dir / "meta.txt").string(), /*with_header=*/true);
  write_report_tsv(rows, (out_dir / "report.tsv").string());

  print_solve_summary(model);
  print_report(rows);
  std::cout << "artifacts written to " << f.out_dir << "\n";
  return kExitOk;
}

void add_load_flags(CLI::App* cmd, LoadFlags& f) {
  cmd->add_option("--max-words", f.max_words,
                  "Load at most this many words per source (0 = all)")
      ->check(CLI::NonNegativeNumber);
}

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--reg-c", f.reg_c, "Regularization weight on ||B||_F^2")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Iteration budget")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--grad-tol", f.grad_tol,
                  "Relative gradient-norm stopping tolerance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed recorded with the run")
      ->capture_default_str();
  cmd->add_flag("--unit-norm,!--no-unit-norm", f.unit_norm,
                "Rescale every embedding to unit length before training");
  cmd->add_flag("--mean-center", f.mean_center,
                "Subtract the per-dimension mean before normalization");
  cmd->add_option("--trace", f.trace_path,
                  "Write per-iteration records (iter, loss, grad_norm, step)");
  add_load_flags(cmd, f.load);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geomet: geometry-aware word meta-embeddings.\n"
      "Aligns two embedding sources with orthogonal rotations and a learned\n"
      "Mahalanobis metric, then averages or concatenates them in the shared\n"
      "latent space."};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand(
      "train", "Learn alignment parameters (U, V, B) for two embedding files");
  train->add_option("src_x", train_flags.src_x, "First embedding file")->required();
  train->add_option("src_z", train_flags.src_z, "Second embedding file")->required();
  train->add_option("out", train_flags.out, "Output params file")->required();
  add_train_flags(train, train_flags);

  TransformFlags transform_flags;
  CLI::App* transform = app.add_subcommand(
      "transform", "Build meta-embeddings from trained params");
  transform->add_option("params", transform_flags.params, "Trained params file")
      ->required();
  transform->add_option("src_x", transform_flags.src_x, "First embedding file")
      ->required();
  transform->add_option("src_z", transform_flags.src_z, "Second embedding file")
      ->required();
  transform->add_option("out", transform_flags.out, "Output embedding file")
      ->required();
  transform->add_option("--mode", transform_flags.mode,
                        "avg | conc | geo-avg | geo-conc")
      ->check(CLI::IsMember({"avg", "conc", "geo-avg", "geo-conc"}))
      ->capture_default_str();
  transform->add_flag("--renorm", transform_flags.renorm,
                      "Unit-normalize the meta-embeddings before writing");
  add_load_flags(transform, transform_flags.load);

  EvalFlags eval_flags;
  CLI::App* evalcmd = app.add_subcommand(
      "eval", "Score an embedding file on every dataset in a directory");
  evalcmd->add_option("embeddings", eval_flags.embeddings, "Embedding file")
      ->required();
  evalcmd->add_option("dataset_dir", eval_flags.dataset_dir,
                      "Directory of *.sim.tsv / *.ana.tsv / *.anascored.tsv")
      ->required();
  evalcmd->add_option("out", eval_flags.out, "Output report TSV")->required();
  add_load_flags(evalcmd, eval_flags.load);

  PipelineFlags pipeline_flags;
  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "train + transform + eval in one run");
  pipeline->add_option("src_x", pipeline_flags.train.src_x, "First embedding file")
      ->required();
  pipeline->add_option("src_z", pipeline_flags.train.src_z, "Second embedding file")
      ->required();
  pipeline->add_option("dataset_dir", pipeline_flags.dataset_dir,
                       "Directory of evaluation datasets")
      ->required();
  pipeline->add_option("out_dir", pipeline_flags.out_dir,
                       "Directory for params.txt, meta.txt, report.tsv")
      ->required();
  pipeline->add_option("--mode", pipeline_flags.mode,
                       "avg | conc | geo-avg | geo-conc")
      ->check(CLI::IsMember({"avg", "conc", "geo-avg", "geo-conc"}))
      ->capture_default_str();
  pipeline->add_flag("--renorm", pipeline_flags.renorm,
                     "Unit-normalize the meta-embeddings");
  add_train_flags(pipeline, pipeline_flags.train);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return run_train(train_flags);
    if (transform->parsed()) return run_transform(transform_flags);
    if (evalcmd->parsed()) return run_eval(eval_flags);
    if (pipeline->parsed()) return run_pipeline(pipeline_flags);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
