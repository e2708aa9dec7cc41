#include <benchmark/benchmark.h>

#include "shl/breakdown.hpp"
#include "shl/eberhard.hpp"
#include "shl/optimizer.hpp"

namespace {

void BM_BreakdownExperiment(benchmark::State& state) {
  auto cfg = shl::default_config();
  cfg.runs = static_cast<std::size_t>(state.range(0));
  cfg.schedule = shl::default_schedule(cfg.runs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::run_experiment(cfg, shl::MasterSeed{1}).pooled.k_sigma);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(cfg.items_per_run));
}
BENCHMARK(BM_BreakdownExperiment)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_EberhardSimulate(benchmark::State& state) {
  const double x[] = {0.2, 1.4, 0.2, 1.4, 0.5};
  auto cfg = shl::settings_config(x, 0.9);
  cfg.pairs_per_setting = static_cast<std::uint64_t>(state.range(0));
  cfg.bins = 30;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::simulate(cfg, shl::MasterSeed{1}).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(BM_EberhardSimulate)->Arg(300'000)->Unit(benchmark::kMillisecond);

void BM_OptimizeSettings(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::optimize_settings(0.9, 20, shl::MasterSeed{1}).f);
  }
}
BENCHMARK(BM_OptimizeSettings)->Unit(benchmark::kMillisecond);

}  // namespace
