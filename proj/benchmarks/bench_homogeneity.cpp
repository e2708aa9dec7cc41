#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "shl/homogeneity.hpp"
#include "shl/rng.hpp"

namespace {

std::vector<double> uniforms(std::size_t n) {
  auto s = shl::make_stream(shl::MasterSeed{7}, 0);
  std::vector<double> x(n);
  for (auto& e : x) e = s.next_uniform();
  return x;
}

void BM_KsTwoSample(benchmark::State& state) {
  const auto x = uniforms(2 * static_cast<std::size_t>(state.range(0)));
  const std::span<const double> xs(x);
  const auto half = x.size() / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::ks_two_sample(xs.first(half), xs.last(half)).p_value);
  }
}
BENCHMARK(BM_KsTwoSample)->Arg(10'000)->Arg(100'000);

void BM_RunsTest(benchmark::State& state) {
  const auto x = uniforms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shl::runs_test(x).p_value);
}
BENCHMARK(BM_RunsTest)->Arg(100'000);

void BM_Cusum(benchmark::State& state) {
  const auto x = uniforms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        shl::cusum_changepoint(x, 99, shl::make_stream(shl::MasterSeed{1}, 0)).p_value);
  }
}
BENCHMARK(BM_Cusum)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace
