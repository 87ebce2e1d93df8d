#include <random>

#include <benchmark/benchmark.h>

#include "spca/experiments.hpp"
#include "spca/kernels.hpp"

namespace {

Eigen::MatrixXd gaussian(int n, int p) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = normal(rng);
  }
  return x;
}

void BM_GramSerial(benchmark::State& state) {
  const Eigen::MatrixXd x = gaussian(256, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spca::kernels::gram_serial(x));
}

void BM_GramParallel(benchmark::State& state) {
  const Eigen::MatrixXd x = gaussian(256, static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(spca::kernels::gram_parallel(x, threads));
}

void BM_Replications(benchmark::State& state) {
  spca::experiments::ExperimentSpec spec;
  spec.model.p = 64;
  spec.model.burn_in = 200;
  spec.n = 128;
  spec.replications = 16;
  spec.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spca::experiments::run_experiment(spec));
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)
    ->Args({128, 1})
    ->Args({128, 4})
    ->Args({512, 1})
    ->Args({512, 4})
    ->Unit(benchmark::kMillisecond);
// threads == 1 runs the serial reference loop.
BENCHMARK(BM_Replications)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
