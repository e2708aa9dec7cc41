#include <cstdint>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "shl/rng.hpp"

namespace {

void BM_NextU64(benchmark::State& state) {
  auto s = shl::make_stream(shl::MasterSeed{1}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.next_u64());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NextU64);

void BM_FillU64(benchmark::State& state) {
  auto s = shl::make_stream(shl::MasterSeed{1}, 0);
  std::vector<std::uint64_t> buf(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    s.fill_u64(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillU64)->Arg(256)->Arg(1 << 16);

void BM_Categorical(benchmark::State& state) {
  const std::vector<double> w = {0.0, 0.0, 0.01, 0.98, 0.01, 0.0};
  const shl::CategoricalSampler sampler(w);
  auto s = shl::make_stream(shl::MasterSeed{1}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sampler(s));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Categorical);

void BM_Shuffle(benchmark::State& state) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(state.range(0)));
  std::iota(v.begin(), v.end(), 0);
  auto s = shl::make_stream(shl::MasterSeed{1}, 0);
  for (auto _ : state) {
    shl::shuffle(std::span<std::uint8_t>(v), s);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Shuffle)->Arg(10'000)->Arg(1'000'000);

}  // namespace
