#include <benchmark/benchmark.h>

#include <random>

#include "fctn/mask.hpp"
#include "fctn/network.hpp"
#include "fctn/objective.hpp"
#include "fctn/tensor.hpp"

namespace {

fctn::FactorSet make_instance(int n, std::int64_t dim, std::int64_t rank) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  fctn::FactorSet fs;
  fs.dims.assign(static_cast<std::size_t>(n), dim);
  fs.ranks = fctn::RankMatrix::uniform(n, rank);
  for (int k = 1; k <= n; ++k) {
    fctn::DenseTensor g(fctn::factor_shape(fs.dims, fs.ranks, k));
    for (double& v : g.values()) v = dist(rng);
    fs.factors.push_back(std::move(g));
  }
  return fs;
}

void BM_compose(benchmark::State& state) {
  const auto fs = make_instance(static_cast<int>(state.range(0)), state.range(1), 3);
  for (auto _ : state) benchmark::DoNotOptimize(fctn_compose(fs));
}

void BM_compose_excluding(benchmark::State& state) {
  const auto fs = make_instance(static_cast<int>(state.range(0)), state.range(1), 3);
  for (auto _ : state) benchmark::DoNotOptimize(compose_excluding(fs, 1));
}

void BM_full_gradient(benchmark::State& state) {
  const auto fs = make_instance(static_cast<int>(state.range(0)), state.range(1), 3);
  const fctn::DenseTensor truth = fctn_compose(fs);
  const fctn::ObservationMask om = fctn::gen_mask(truth.dims(), 0.3, 1);
  const fctn::Problem p(truth, om.mask, fs.ranks);
  for (auto _ : state) benchmark::DoNotOptimize(full_gradient(p, fs));
}

void BM_generalized_unfold(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  fctn::DenseTensor x({16, 16, 16, 16});
  for (double& v : x.values()) v = dist(rng);
  const fctn::UnfoldSpec spec{{2, 4}, {1, 3}};
  for (auto _ : state) benchmark::DoNotOptimize(generalized_unfold(x, spec));
}

void BM_gen_mask(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(fctn::gen_mask({64, 64, 16}, 0.3, 5));
}

}  // namespace

BENCHMARK(BM_compose)->Args({3, 20})->Args({4, 12})->Args({4, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_compose_excluding)->Args({4, 12})->Args({4, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_full_gradient)->Args({3, 20})->Args({4, 12})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_generalized_unfold)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_gen_mask)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
