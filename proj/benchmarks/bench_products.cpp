// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "singprod/distributions.hpp"
#include "singprod/estimators.hpp"
#include "singprod/matrix.hpp"
#include "singprod/quadrature.hpp"
#include "singprod/random.hpp"

using namespace singprod;

namespace {

std::vector<double> path(std::size_t n) {
  RandomStream rng(1, 0);
  return sample(Exponential{1}, rng, n);
}

void BM_LogNormDirect(benchmark::State& state) {
  const auto xs = path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(log_norm_direct(xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogNormDirect)->Arg(1 << 10)->Arg(1 << 16);

void BM_LogNormClosed(benchmark::State& state) {
  const auto xs = path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(log_norm_closed(xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogNormClosed)->Arg(1 << 10)->Arg(1 << 16);

void BM_Sigma2Block(benchmark::State& state) {
  RandomStream rng(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sigma2_block_estimate(Laplace{1}, static_cast<std::size_t>(state.range(0)), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sigma2Block)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_Sigma2Quadrature(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sigma2_quadrature(Uniform{-1, 2}));
}
BENCHMARK(BM_Sigma2Quadrature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
