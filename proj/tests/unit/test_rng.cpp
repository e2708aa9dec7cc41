#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles/oracles.hpp"
#include "shl/error.hpp"
#include "shl/rng.hpp"

namespace shl {
namespace {

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}),
            (PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}),
            (PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

std::vector<double> draws(MasterSeed seed, std::uint64_t id, std::size_t n) {
  RandomStream s = make_stream(seed, id);
  std::vector<double> out(n);
  for (auto& v : out) v = next_uniform(s);
  return out;
}

TEST(RandomStream, SameSeedAndIdReproduce) {
  EXPECT_EQ(draws(MasterSeed{7}, 0, 1000), draws(MasterSeed{7}, 0, 1000));
}

TEST(RandomStream, DistinctIdsDiffer) {
  EXPECT_NE(draws(MasterSeed{7}, 0, 10000), draws(MasterSeed{7}, 1, 10000));
}

TEST(RandomStream, DistinctSeedsDiffer) {
  EXPECT_NE(draws(MasterSeed{7}, 0, 10000), draws(MasterSeed{8}, 0, 10000));
}

TEST(RandomStream, CounterAdvancesByOnePerDraw) {
  RandomStream s = make_stream(MasterSeed{3}, 5);
  EXPECT_EQ(s.counter(), 0u);
  (void)s.next_uniform();
  (void)s.next_u64();
  (void)s.next_below(10);
  EXPECT_EQ(s.counter(), 3u);
}

TEST(RandomStream, JumpMatchesSequentialDraws) {
  RandomStream a = make_stream(MasterSeed{11}, 2);
  for (int i = 0; i < 37; ++i) (void)a.next_u64();
  RandomStream b = make_stream(MasterSeed{11}, 2).jumped(37);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, AdvancingOneStreamLeavesOthersAlone) {
  const auto reference = draws(MasterSeed{5}, 9, 50);
  RandomStream other = make_stream(MasterSeed{5}, 8);
  for (int i = 0; i < 1000; ++i) (void)other.next_u64();
  EXPECT_EQ(draws(MasterSeed{5}, 9, 50), reference);
}

// Even words of a fill are exactly what next_u64 returns for the same counter.
TEST(RandomStream, FillMatchesBlockHalves) {
  for (std::size_t n : {1u, 2u, 7u, 8u, 9u, 64u}) {
    RandomStream s = make_stream(MasterSeed{21}, 4);
    std::vector<std::uint64_t> out(n);
    s.fill_u64(out);
    EXPECT_EQ(s.counter(), (n + 1) / 2);
    RandomStream ref = make_stream(MasterSeed{21}, 4);
    for (std::size_t i = 0; i < n; i += 2) {
      EXPECT_EQ(out[i], ref.next_u64()) << "n=" << n << " i=" << i;
    }
  }
}

TEST(NextUniform, RangeMeanAndUniformity) {
  const auto v = draws(MasterSeed{2024}, 0, 1'000'000);
  EXPECT_TRUE(std::all_of(v.begin(), v.end(),
                          [](double x) { return x >= 0.0 && x < 1.0; }));
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  EXPECT_NEAR(mean, 0.5, 0.002);
  EXPECT_LT(oracle::uniform_ks_distance(v), 0.002);
}

TEST(NextUniform, StreamsUncorrelated) {
  const auto x = draws(MasterSeed{99}, 1, 100'000);
  const auto y = draws(MasterSeed{99}, 2, 100'000);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  EXPECT_LT(std::fabs(sxy / std::sqrt(sxx * syy)), 0.01);
}

TEST(SampleCategorical, DegenerateWeightAlwaysWins) {
  RandomStream s = make_stream(MasterSeed{1}, 0);
  const std::vector<double> w = {1.0, 0.0, 0.0};
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(sample_categorical(s, w), 0u);
}

TEST(SampleCategorical, FairCoin) {
  RandomStream s = make_stream(MasterSeed{1}, 0);
  const std::vector<double> w = {1.0, 1.0};
  std::size_t zeros = 0;
  for (int i = 0; i < 1'000'000; ++i) zeros += sample_categorical(s, w) == 0;
  EXPECT_NEAR(zeros / 1e6, 0.5, 0.002);
}

TEST(SampleCategorical, ConsumesOneDraw) {
  RandomStream s = make_stream(MasterSeed{1}, 0);
  const std::vector<double> w = {0.2, 0.3, 0.5};
  (void)sample_categorical(s, w);
  EXPECT_EQ(s.counter(), 1u);
}

TEST(SampleCategorical, ZeroWeightsNeverReturned) {
  RandomStream s = make_stream(MasterSeed{4}, 0);
  const std::vector<double> w = {0.0, 0.5, 0.0, 0.5, 0.0};
  for (int i = 0; i < 100000; ++i) {
    const auto k = sample_categorical(s, w);
    ASSERT_TRUE(k == 1 || k == 3);
  }
}

TEST(SampleCategorical, SamplerMatchesFreeFunction) {
  const std::vector<double> w = {0.01, 0.98, 0.01, 0.0, 0.0, 0.0};
  CategoricalSampler sampler(w);
  RandomStream a = make_stream(MasterSeed{8}, 3), b = a;
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(sampler(a), sample_categorical(b, w));
}

TEST(SampleCategorical, InvalidWeights) {
  RandomStream s = make_stream(MasterSeed{1}, 0);
  for (const std::vector<double>& w :
       {std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, -0.5},
        std::vector<double>{}}) {
    try {
      (void)sample_categorical(s, w);
      FAIL() << "expected invalid-distribution error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidDistribution);
    }
  }
}

TEST(Shuffle, IsPermutationAndCountsDraws) {
  std::vector<int> v(1001);
  std::iota(v.begin(), v.end(), 0);
  RandomStream s = make_stream(MasterSeed{6}, 0);
  shuffle(std::span<int>(v), s);
  EXPECT_EQ(s.counter(), 500u);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 1001; ++i) ASSERT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(Shuffle, PositionsRoughlyUniform) {
  // Element 0 of a 4-element array should land in each slot ~1/4 of the time.
  std::array<int, 4> hits{};
  RandomStream s = make_stream(MasterSeed{12}, 0);
  for (int t = 0; t < 40000; ++t) {
    std::array<int, 4> v = {0, 1, 2, 3};
    shuffle(std::span<int>(v), s);
    ++hits[std::find(v.begin(), v.end(), 0) - v.begin()];
  }
  for (int h : hits) EXPECT_NEAR(h / 40000.0, 0.25, 0.01);
}

}  // namespace
}  // namespace shl
