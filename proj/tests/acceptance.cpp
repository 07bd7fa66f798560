// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Run with no arguments for the full suite, with
// --criterion N for a single one, or --list to enumerate.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "geomet/embedding.hpp"
#include "geomet/errors.hpp"
#include "geomet/eval.hpp"
#include "geomet/meta.hpp"
#include "geomet/objective.hpp"
#include "geomet/params_io.hpp"
#include "geomet/solver.hpp"
#include "test_support.hpp"

using namespace geomet;
using testsupport::Rng;

namespace {

namespace fs = std::filesystem;

struct Checker {
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      std::cerr << "    check failed: " << what << "\n";
    }
  }
};

AlignedPair make_pair(const Matrix& x, const Matrix& z) {
  std::vector<std::string> words = testsupport::make_words(x.cols());
  return AlignedPair(EmbeddingTable(words, x), EmbeddingTable(words, z));
}

// 1. Identity specialization: with U = V = B = I the geometry-aware modes
//    reproduce plain averaging/concatenation entrywise within 1e-12.
bool criterion_identity_specialization() {
  Checker check;
  Rng rng(101);
  AlignedPair pair = make_pair(testsupport::random_matrix(rng, 6, 30),
                               testsupport::random_matrix(rng, 6, 30));
  LatentMap map = make_latent_map(init_identity(6));

  Matrix geo_avg = build_meta(pair, map, MetaMode::kGeoAvg).vectors();
  Matrix avg = build_meta(pair, std::nullopt, MetaMode::kAvg).vectors();
  check.require((geo_avg - avg).cwiseAbs().maxCoeff() <= 1e-12,
                "geo-avg equals avg within 1e-12");

  Matrix geo_conc = build_meta(pair, map, MetaMode::kGeoConc).vectors();
  Matrix conc = build_meta(pair, std::nullopt, MetaMode::kConc).vectors();
  check.require((geo_conc - conc).cwiseAbs().maxCoeff() <= 1e-12,
                "geo-conc equals conc within 1e-12");
  return check.ok;
}

// 2. Gradient correctness: analytic Riemannian gradients against central
//    finite differences of the materialized loss, 10 instances x 10 random
//    tangent directions, relative error <= 1e-5.
bool criterion_gradient_correctness() {
  Checker check;
  Rng rng(102);
  const Index d = 5;
  const Index n = 20;
  const double h = 1e-5;
  for (int instance = 0; instance < 10; ++instance) {
    Matrix x = testsupport::random_matrix(rng, d, n);
    Matrix z = testsupport::random_matrix(rng, d, n);
    GramCache cache = build_gram_cache(make_pair(x, z));
    ProductPoint p = testsupport::random_point(rng, d);
    const double c = (instance % 2 == 0) ? 0.0 : 1.0;
    TangentVector grad = riemannian_grad(p, cache, RegWeight(c));

    for (int k = 0; k < 10; ++k) {
      TangentVector t = testsupport::random_tangent(rng, p);
      double analytic = inner(p, grad, t);
      double f_plus = testsupport::naive_loss(x, z, p.u.m() + h * t.xi_u,
                                              p.v.m() + h * t.xi_v,
                                              p.b.m() + h * t.xi_b, c);
      double f_minus = testsupport::naive_loss(x, z, p.u.m() - h * t.xi_u,
                                               p.v.m() - h * t.xi_v,
                                               p.b.m() - h * t.xi_b, c);
      double fd = (f_plus - f_minus) / (2.0 * h);
      double denom = std::max({std::abs(analytic), std::abs(fd), 1e-8});
      check.require(std::abs(analytic - fd) / denom <= 1e-5,
                    "instance " + std::to_string(instance) + " direction " +
                        std::to_string(k) + ": |" + std::to_string(analytic) +
                        " - " + std::to_string(fd) + "| / " +
                        std::to_string(denom) + " <= 1e-5");
    }
  }
  return check.ok;
}

// 3. Gram-trick exactness: the O(d^3) loss equals the materialized
//    ||X^T U^T B V Z - I||^2 + C ||B||^2 within 1e-10 relative.
bool criterion_gram_trick_exactness() {
  Checker check;
  Rng rng(103);
  for (int k = 0; k < 20; ++k) {
    const Index d = 2 + static_cast<Index>(rng() % 5);   // <= 6
    const Index n = 2 + static_cast<Index>(rng() % 49);  // <= 50
    Matrix x = testsupport::random_matrix(rng, d, n);
    Matrix z = testsupport::random_matrix(rng, d, n);
    ProductPoint p = testsupport::random_point(rng, d);
    const double c = (k % 2 == 0) ? 0.0 : 1.0;

    double fast = loss(p, build_gram_cache(make_pair(x, z)), RegWeight(c));
    double naive = testsupport::naive_loss(x, z, p.u.m(), p.v.m(), p.b.m(), c);
    check.require(std::abs(fast - naive) <= 1e-10 * std::max(1.0, std::abs(naive)),
                  "instance " + std::to_string(k) + ": gram loss " +
                      std::to_string(fast) + " vs naive " + std::to_string(naive));
  }
  return check.ok;
}

// 4. Feasibility under optimization: after 200 iterations on a d=20, n=500
//    instance the iterate is still on-manifold and the loss never increased.
bool criterion_feasibility_under_optimization() {
  Checker check;
  Rng rng(104);
  const Index d = 20;
  const Index n = 500;
  Matrix x = testsupport::unit_columns(testsupport::random_matrix(rng, d, n));
  Matrix z = testsupport::unit_columns(testsupport::random_matrix(rng, d, n));
  GramCache cache = build_gram_cache(make_pair(x, z));

  SolverConfig cfg;
  cfg.max_iters = 200;
  cfg.grad_tol = 1e-12;
  SolveResult res = solve(cache, cfg);
  check.require(res.trace.accepted_steps == 200, "all 200 iterations ran");

  const Matrix id = Matrix::Identity(d, d);
  const ProductPoint& p = res.point;
  check.require((p.u.m().transpose() * p.u.m() - id).norm() <= 1e-8,
                "||U^T U - I||_F <= 1e-8");
  check.require((p.v.m().transpose() * p.v.m() - id).norm() <= 1e-8,
                "||V^T V - I||_F <= 1e-8");
  check.require((p.b.m() - p.b.m().transpose()).norm() <= 1e-10, "B symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(p.b.m());
  check.require(eig.eigenvalues().minCoeff() > 0.0, "min eig(B) > 0");

  for (std::size_t i = 1; i < res.trace.records.size(); ++i)
    check.require(res.trace.records[i].loss <= res.trace.records[i - 1].loss,
                  "loss non-increasing at record " + std::to_string(i));
  return check.ok;
}

// 5. Synthetic recovery: Z = Q X with 1% additive noise; after training,
//    latent-space nearest-neighbor retrieval recovers >= 95% of words and the
//    trained loss is strictly below the identity-initialization loss.
bool criterion_synthetic_recovery() {
  Checker check;
  Rng rng(105);
  const Index d = 10;
  const Index n = 100;
  Matrix x = testsupport::unit_columns(testsupport::random_matrix(rng, d, n));
  Matrix q = testsupport::random_orthogonal(rng, d);
  Matrix z = q * x + 0.01 * testsupport::random_matrix(rng, d, n) /
                         std::sqrt(static_cast<double>(d));
  GramCache cache = build_gram_cache(make_pair(x, z));

  SolverConfig cfg;
  cfg.reg_c = RegWeight(1.0);
  double loss_identity = loss(init_identity(d), cache, cfg.reg_c);
  SolveResult res = solve(cache, cfg);
  check.require(res.trace.records.back().loss < loss_identity,
                "trained loss below identity-initialization loss");

  // brute-force retrieval by the alignment score
  Matrix scores =
      x.transpose() * res.point.u.m().transpose() * res.point.b.m() * res.point.v.m() * z;
  Index hits = 0;
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    scores.row(i).maxCoeff(&best);
    if (best == i) ++hits;
  }
  double accuracy = static_cast<double>(hits) / static_cast<double>(n);
  check.require(accuracy >= 0.95,
                "retrieval accuracy " + std::to_string(accuracy) + " >= 0.95");
  return check.ok;
}

// 6. Matrix square root: exact diagonal case and random reconstructions.
bool criterion_matrix_square_root() {
  Checker check;
  Matrix diag(2, 2);
  diag << 4, 0, 0, 9;
  Matrix expected(2, 2);
  expected << 2, 0, 0, 3;
  check.require(
      (sqrt_spd(SPDPoint(diag)).m() - expected).cwiseAbs().maxCoeff() <= 1e-12,
      "sqrt(diag(4,9)) = diag(2,3) within 1e-12");

  Rng rng(106);
  for (int k = 0; k < 20; ++k) {
    const Index d = 2 + static_cast<Index>(rng() % 11);
    SPDPoint b(testsupport::random_spd(rng, d));
    SPDPoint s = sqrt_spd(b);
    check.require((s.m() * s.m() - b.m()).norm() <= 1e-8 * b.m().norm(),
                  "reconstruction " + std::to_string(k));
  }
  return check.ok;
}

// 7. Spearman oracle values and monotone-transform invariance.
bool criterion_spearman_oracle() {
  Checker check;
  check.require(std::abs(spearman({1, 2, 3}, {10, 20, 30}) - 1.0) <= 1e-7,
                "identical order gives 1.0");
  check.require(std::abs(spearman({1, 2, 3}, {3, 2, 1}) + 1.0) <= 1e-7,
                "reversed order gives -1.0");
  check.require(std::abs(spearman({1, 2, 3}, {1, 1, 2}) - 0.8660254) <= 1e-7,
                "tie case gives 0.8660254");

  Rng rng(107);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> xs(12);
    std::vector<double> ys(12);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = unif(rng);
      ys[i] = unif(rng);
    }
    double base = spearman(xs, ys);
    std::vector<double> xs_t = xs;
    for (auto& v : xs_t) v = std::exp(0.5 * v) + 2.0;
    check.require(std::abs(spearman(xs_t, ys) - base) <= 1e-12,
                  "monotone transform invariance, sequence " + std::to_string(k));
  }
  return check.ok;
}

// 8. Analogy oracle: parity with an exhaustive scan on random queries plus the
//    exact parallelogram construction.
bool criterion_analogy_oracle() {
  Checker check;
  Rng rng(108);
  EmbeddingTable t = testsupport::random_table(rng, 8, 200);
  for (int k = 0; k < 100; ++k) {
    const std::string& a = t.words()[rng() % 200];
    const std::string& b = t.words()[rng() % 200];
    const std::string& c = t.words()[rng() % 200];
    check.require(answer_analogy(t, a, b, c) ==
                      testsupport::scan_analogy_oracle(t, a, b, c),
                  "query " + std::to_string(k) + " matches the exhaustive scan");
  }

  Matrix m(2, 4);
  m << 1, 1, 3, 3, 0, 1, 0, 1;  // q - p + r = s exactly
  EmbeddingTable para({"p", "q", "r", "s"}, m);
  AnalogyDataset ds{"parallelogram", {{"p", "q", "r", "s", 0.0}}, false};
  check.require(eval_analogy(para, ds, false).score == 1.0,
                "parallelogram accuracy 1.0");
  return check.ok;
}

// 9. End-to-end determinism: the pipeline run twice with one seed produces
//    byte-identical params, meta-embedding and report files.
bool criterion_end_to_end_determinism() {
  Checker check;
  Rng rng(109);
  const Index d = 10;

  fs::path root = fs::temp_directory_path() /
                  ("geomet_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  // 1,000-word first source; 800 shared words plus 200 of its own in the
  // second source.
  EmbeddingTable x = testsupport::random_table(rng, d, 1000, "w");
  std::vector<std::string> z_words = testsupport::make_words(800, "w");
  for (Index i = 0; i < 200; ++i) z_words.push_back("zonly" + std::to_string(i));
  EmbeddingTable z(z_words, testsupport::random_matrix(rng, d, 1000));
  save_embeddings(x, (root / "x.txt").string(), true);
  save_embeddings(z, (root / "z.txt").string(), true);

  fs::create_directories(root / "ds");
  {
    std::ofstream sim(root / "ds" / "toy.sim.tsv", std::ios::binary);
    for (int i = 0; i < 10; ++i)
      sim << "w" << (3 * i) << "\tw" << (7 * i + 1) << "\t" << (10 - i) << ".5\n";
    sim << "w1\toovword\t3.0\n";
    std::ofstream ana(root / "ds" / "toy.ana.tsv", std::ios::binary);
    for (int i = 0; i < 8; ++i)
      ana << "w" << i << "\tw" << (i + 10) << "\tw" << (i + 20) << "\tw"
          << (i + 30) << "\n";
    std::ofstream scored(root / "ds" / "toy.anascored.tsv", std::ios::binary);
    for (int i = 0; i < 8; ++i)
      scored << "w" << (i + 40) << "\tw" << (i + 50) << "\tw" << (i + 60) << "\tw"
             << (i + 70) << "\t" << (0.1 * i) << "\n";
  }

  auto run_once = [&](const std::string& out_dir) -> bool {
    std::string cmd = std::string("\"") + GEOMET_CLI_PATH + "\" pipeline " +
                      (root / "x.txt").string() + " " + (root / "z.txt").string() +
                      " " + (root / "ds").string() + " " + out_dir +
                      " --mode geo-conc --max-iters 60 --seed 42 > " +
                      (root / "log.txt").string() + " 2>&1";
    int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) && WEXITSTATUS(raw) == 0;
  };
  auto read_all = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };

  check.require(run_once((root / "run1").string()), "first pipeline run exits 0");
  check.require(run_once((root / "run2").string()), "second pipeline run exits 0");
  for (const char* name : {"params.txt", "meta.txt", "report.tsv"}) {
    std::string a = read_all(root / "run1" / name);
    std::string b = read_all(root / "run2" / name);
    check.require(!a.empty(), std::string(name) + " is nonempty");
    check.require(a == b, std::string(name) + " is byte-identical across runs");
  }

  fs::remove_all(root);
  return check.ok;
}

struct Criterion {
  int id;
  const char* name;
  bool (*fn)();
};

const Criterion kCriteria[] = {
    {1, "identity-specialization", criterion_identity_specialization},
    {2, "gradient-correctness", criterion_gradient_correctness},
    {3, "gram-trick-exactness", criterion_gram_trick_exactness},
    {4, "feasibility-under-optimization", criterion_feasibility_under_optimization},
    {5, "synthetic-recovery", criterion_synthetic_recovery},
    {6, "matrix-square-root", criterion_matrix_square_root},
    {7, "spearman-oracle", criterion_spearman_oracle},
    {8, "analogy-oracle", criterion_analogy_oracle},
    {9, "end-to-end-determinism", criterion_end_to_end_determinism},
};

constexpr int kFullScaleId = 10;

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--list") {
      for (const Criterion& c : kCriteria)
        std::cout << c.id << "  " << c.name << "\n";
      std::cout << kFullScaleId << "  full-scale-trend (optional, not run here)\n";
      return 0;
    }
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
      continue;
    }
    std::cerr << "usage: geomet_acceptance [--list] [--criterion N]...\n";
    return 2;
  }

  bool all_pass = true;
  bool ran_any = false;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    ran_any = true;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::cerr << "    exception: " << e.what() << "\n";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    std::printf("%s %2d  %-32s (%.2f s)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                secs);
    all_pass &= ok;
  }

  if (selected.empty() ||
      std::find(selected.begin(), selected.end(), kFullScaleId) != selected.end()) {
    ran_any = true;
    std::printf("SKIP %2d  %-32s %s\n", kFullScaleId, "full-scale-trend",
                "optional; needs pretrained sources, see scripts/run_fullscale.sh");
  }
  if (!ran_any) {
    std::cerr << "no matching criterion\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
