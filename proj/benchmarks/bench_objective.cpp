// Hot-loop costs: gram construction is O(n d^2), loss and gradient O(d^3).

#include <benchmark/benchmark.h>

#include <random>

#include "geomet/objective.hpp"

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

void BM_BuildGramCache(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Index d = state.range(0);
  const Index n = state.range(1);
  AlignedPair pair = random_pair(rng, d, n);
  for (auto _ : state) {
    GramCache cache = build_gram_cache(pair);
    benchmark::DoNotOptimize(cache.cxx.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildGramCache)->Args({100, 1000})->Args({100, 10000})->Args({300, 10000});

void BM_Loss(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Index d = state.range(0);
  GramCache cache = build_gram_cache(random_pair(rng, d, 4 * d));
  ProductPoint p = ProductPoint::Identity(d);
  RegWeight reg(1.0);
  for (auto _ : state) {
    double f = loss(p, cache, reg);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_Loss)->Arg(50)->Arg(100)->Arg(300);

void BM_RiemannianGrad(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Index d = state.range(0);
  GramCache cache = build_gram_cache(random_pair(rng, d, 4 * d));
  ProductPoint p = ProductPoint::Identity(d);
  RegWeight reg(1.0);
  for (auto _ : state) {
    TangentVector g = riemannian_grad(p, cache, reg);
    benchmark::DoNotOptimize(g.xi_b.data());
  }
}
BENCHMARK(BM_RiemannianGrad)->Arg(50)->Arg(100)->Arg(300);

}  // namespace
