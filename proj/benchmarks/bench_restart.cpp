#include <benchmark/benchmark.h>

#include "aclora/spectral_restart.hpp"
#include "aclora/tasks.hpp"
#include "aclora/trainer.hpp"

namespace {

using namespace aclora;

void BM_Svd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(42);
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd(m));
  }
}
BENCHMARK(BM_Svd)->Arg(16)->Arg(64)->Arg(256);

void BM_RestartModule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  AdapterPair adapter = init_adapter(n, n, n / 4, 7);
  Rng rng(11);
  for (auto _ : state) {
    AdapterPair copy = adapter;
    Rng local = rng.fork(1);
    benchmark::DoNotOptimize(restart_module(copy, 0.9, local));
  }
}
BENCHMARK(BM_RestartModule)->Arg(64)->Arg(128);

void BM_TrainEpochs(benchmark::State& state) {
  SyntheticTask task = make_task(64, 64, 4, default_profile(4), 0.05, 3);
  TrainConfig config;
  config.total_epochs = static_cast<int>(state.range(0));
  config.restart_interval = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(task, config));
  }
}
BENCHMARK(BM_TrainEpochs)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
