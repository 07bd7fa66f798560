// Solver iterations, meta construction and analogy queries at realistic sizes.

#include <benchmark/benchmark.h>

#include <random>

#include "geomet/eval.hpp"
#include "geomet/meta.hpp"
#include "geomet/solver.hpp"

namespace {

using namespace geomet;

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

AlignedPair random_pair(std::mt19937_64& rng, Index d, Index n) {
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  EmbeddingTable x(words, random_matrix(rng, d, n));
  EmbeddingTable z(std::move(words), random_matrix(rng, d, n));
  return AlignedPair(std::move(x), std::move(z));
}

void BM_SolveTenIterations(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const Index d = state.range(0);
  GramCache cache = build_gram_cache(random_pair(rng, d, 2000));
  SolverConfig cfg;
  cfg.max_iters = 10;
  cfg.grad_tol = 0.0;
  for (auto _ : state) {
    SolveResult res = solve(cache, cfg);
    benchmark::DoNotOptimize(res.trace.records.data());
  }
}
BENCHMARK(BM_SolveTenIterations)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_BuildMetaGeoConc(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const Index d = 100;
  const Index n = state.range(0);
  AlignedPair pair = random_pair(rng, d, n);
  LatentMap map = make_latent_map(ProductPoint::Identity(d));
  for (auto _ : state) {
    EmbeddingTable meta = build_meta(pair, map, MetaMode::kGeoConc);
    benchmark::DoNotOptimize(meta.vectors().data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildMetaGeoConc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AnswerAnalogy(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const Index d = 100;
  const Index n = state.range(0);
  AlignedPair pair = random_pair(rng, d, n);
  const EmbeddingTable& t = pair.x();
  for (auto _ : state) {
    std::string ans = answer_analogy(t, "w1", "w2", "w3");
    benchmark::DoNotOptimize(ans.data());
  }
}
BENCHMARK(BM_AnswerAnalogy)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
