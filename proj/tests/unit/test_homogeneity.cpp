#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles/oracles.hpp"
#include "shl/error.hpp"
#include "shl/homogeneity.hpp"
#include "shl/parallel.hpp"
#include "shl/rng.hpp"

namespace shl {
namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kPrecondition;
}

template <typename T>
T detail(const TestResult& r, const std::string& key) {
  return std::get<T>(r.detail.at(key));
}

std::vector<double> uniforms(MasterSeed seed, std::uint64_t id, std::size_t n) {
  RandomStream s = make_stream(seed, id);
  std::vector<double> v(n);
  for (auto& x : v) x = s.next_uniform();
  return v;
}

RunSet categorical(std::vector<CategoricalOutcomes> runs, std::int32_t m) {
  RunSet rs;
  rs.m = m;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    rs.runs.push_back({static_cast<std::int64_t>(i + 1), std::move(runs[i])});
  }
  return rs;
}

TEST(Tabulate, CountsPerRun) {
  const auto t = tabulate(categorical({{1, 1, 2}, {2, 2, 1}}, 2));
  EXPECT_EQ(t, ContingencyTable({{2, 1}, {1, 2}}));
  EXPECT_EQ(t.row_sum(0), 3u);
  EXPECT_EQ(t.col_sum(1), 3u);
}

TEST(Tabulate, Preconditions) {
  EXPECT_EQ(kind_of([] { tabulate(categorical({{1, 2}}, 2)); }),
            ErrorKind::kPrecondition);
  RunSet mixed = categorical({{1, 2}}, 2);
  mixed.runs.push_back({2, RealOutcomes{0.5}});
  EXPECT_EQ(kind_of([&] { tabulate(mixed); }), ErrorKind::kType);
}

TEST(Chi2Homogeneity, IdenticalRows) {
  const auto r = chi2_homogeneity(ContingencyTable({{10, 10}, {10, 10}}));
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.dof, 1);
}

TEST(Chi2Homogeneity, DisjointRows) {
  const auto r = chi2_homogeneity(ContingencyTable({{50, 0}, {0, 50}}));
  EXPECT_DOUBLE_EQ(r.statistic, 100.0);
  EXPECT_EQ(r.dof, 1);
  EXPECT_NEAR(r.p_value, 1.5e-23, 0.05e-23);
}

TEST(Chi2Homogeneity, DropsEmptyColumnsAndFlagsLowExpected) {
  const auto r =
      chi2_homogeneity(ContingencyTable({{3, 0, 1, 0}, {2, 0, 0, 0}}));
  EXPECT_EQ(r.dof, 1);
  EXPECT_EQ(detail<std::string>(r, "dropped_columns"), "2,4");
  EXPECT_TRUE(detail<bool>(r, "low_expected_warning"));
}

TEST(Chi2Homogeneity, DegenerateTable) {
  EXPECT_EQ(kind_of([] { chi2_homogeneity(ContingencyTable({{5, 0}, {7, 0}})); }),
            ErrorKind::kDegenerateTable);
}

TEST(Chi2Homogeneity, MatchesHandComputation) {
  // 3 x 3 table, statistic computed independently from margins.
  const std::vector<std::vector<std::uint64_t>> rows = {
      {20, 30, 50}, {25, 25, 50}, {40, 20, 40}};
  double grand = 0, stat = 0;
  std::vector<double> rs(3, 0), cs(3, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      rs[i] += rows[i][j];
      cs[j] += rows[i][j];
      grand += rows[i][j];
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double e = rs[i] * cs[j] / grand;
      stat += (rows[i][j] - e) * (rows[i][j] - e) / e;
    }
  const auto r = chi2_homogeneity(ContingencyTable(rows));
  EXPECT_NEAR(r.statistic, stat, 1e-12);
  EXPECT_EQ(r.dof, 4);
  EXPECT_NEAR(r.p_value, oracle::chi2_sf_quadrature(stat, 4), 1e-10);
}

TEST(KsTwoSample, Examples) {
  const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
  const auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  EXPECT_EQ(ks_two_sample(a, b).statistic, 1.0);
  EXPECT_EQ(kind_of([&] { ks_two_sample(a, {}); }),
            ErrorKind::kInsufficientSample);
}

TEST(KsTwoSample, BruteForceOracleWithTies) {
  RandomStream s = make_stream(MasterSeed{31}, 0);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> x(5 + s.next_below(60)), y(5 + s.next_below(60));
    for (auto& v : x) v = static_cast<double>(s.next_below(12));
    for (auto& v : y) v = static_cast<double>(s.next_below(12)) + (rep % 3 == 0);
    EXPECT_NEAR(ks_two_sample(x, y).statistic, oracle::ks_distance_brute(x, y),
                1e-15);
  }
}

TEST(KsTwoSample, NullReplicates) {
  int pass = 0;
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    const auto v = uniforms(MasterSeed{rep}, 0, 20000);
    const std::span<const double> all(v);
    pass += ks_two_sample(all.first(10000), all.last(10000)).p_value > 0.001;
  }
  EXPECT_GE(pass, 495);
}

TEST(RunsTest, Alternating) {
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 == 0 ? 1.0 : 2.0;
  const auto r = runs_test(x);
  EXPECT_EQ(r.statistic, 100.0);
  EXPECT_NEAR(detail<double>(r, "expected_runs"), 51.0, 1e-12);
  EXPECT_NEAR(detail<double>(r, "sd_runs"), 4.97468, 1e-4);
  EXPECT_NEAR(detail<double>(r, "z"), 9.85, 0.01);
  EXPECT_LT(r.p_value, 1e-20);
}

TEST(RunsTest, TiesAtMedianDiscarded) {
  std::vector<double> x;
  for (int i = 0; i < 30; ++i) x.push_back(i % 3);  // median is 1
  const auto r = runs_test(x);
  EXPECT_EQ(detail<std::int64_t>(r, "discarded_ties"), 10);
  EXPECT_EQ(detail<std::int64_t>(r, "n_above") + detail<std::int64_t>(r, "n_below"), 20);
  // After dropping the 1s the sequence is 0,2,0,2,... : every value is a run.
  EXPECT_EQ(r.statistic, 20.0);
}

TEST(RunsTest, Errors) {
  const std::vector<double> flat(40, 3.0);
  EXPECT_EQ(kind_of([&] { runs_test(flat); }), ErrorKind::kDegenerateSequence);
  const std::vector<double> short_x(19, 1.0);
  EXPECT_EQ(kind_of([&] { runs_test(short_x); }), ErrorKind::kInsufficientSample);
}

TEST(RunsTest, NullReplicates) {
  int pass = 0;
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    pass += runs_test(uniforms(MasterSeed{rep}, 1, 10000)).p_value > 0.001;
  }
  EXPECT_GE(pass, 495);
}

TEST(Lag1, AntiCorrelated) {
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 == 0 ? 1.0 : -1.0;
  const auto r = lag1_autocorr_test(x);
  EXPECT_NEAR(r.statistic, -0.99, 1e-12);
  EXPECT_LT(detail<double>(r, "z"), -9.0);
  EXPECT_LT(r.p_value, 1e-15);
}

TEST(Lag1, ZeroCorrelationHasUnitInflation) {
  // 1,0,-1,0 repeated: every lag-1 product is zero.
  std::vector<double> x;
  for (int i = 0; i < 10; ++i) x.insert(x.end(), {1.0, 0.0, -1.0, 0.0});
  const auto r = lag1_autocorr_test(x);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(detail<double>(r, "sem_inflation"), 1.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Lag1, Errors) {
  const std::vector<double> flat(40, 2.0);
  EXPECT_EQ(kind_of([&] { lag1_autocorr_test(flat); }),
            ErrorKind::kDegenerateSequence);
  const std::vector<double> short_x(29, 1.0);
  EXPECT_EQ(kind_of([&] { lag1_autocorr_test(short_x); }),
            ErrorKind::kInsufficientSample);
}

TEST(Lag1, NullReplicates) {
  int pass = 0;
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    pass += std::fabs(lag1_autocorr_test(uniforms(MasterSeed{rep}, 2, 10000))
                          .statistic) < 0.04;
  }
  EXPECT_GE(pass, 495);
}

TEST(Cusum, StepChange) {
  std::vector<double> x(1000, 0.0);
  std::fill(x.begin() + 500, x.end(), 1.0);
  const auto r = cusum_changepoint(x, 199, make_stream(MasterSeed{1}, 0));
  EXPECT_NEAR(static_cast<double>(detail<std::int64_t>(r, "change_point")), 500.0, 2.0);
  EXPECT_DOUBLE_EQ(r.statistic, 250.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 200.0);
}

TEST(Cusum, Errors) {
  const std::vector<double> flat(100, 1.0);
  const auto s = make_stream(MasterSeed{1}, 0);
  EXPECT_EQ(kind_of([&] { cusum_changepoint(flat, 99, s); }),
            ErrorKind::kDegenerateSequence);
  const auto v = uniforms(MasterSeed{1}, 0, 49);
  EXPECT_EQ(kind_of([&] { cusum_changepoint(v, 99, s); }),
            ErrorKind::kInsufficientSample);
  const auto w = uniforms(MasterSeed{1}, 0, 60);
  EXPECT_EQ(kind_of([&] { cusum_changepoint(w, 98, s); }),
            ErrorKind::kPrecondition);
}

TEST(Cusum, PermutationLatticeAndNull) {
  int pass = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto v = uniforms(MasterSeed{rep}, 3, 200);
    const auto r = cusum_changepoint(v, 99, make_stream(MasterSeed{rep}, 4));
    const double scaled = r.p_value * 100.0;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
    EXPECT_GE(r.p_value, 0.01);
    EXPECT_LE(r.p_value, 1.0);
    pass += r.p_value > 0.001;
  }
  EXPECT_EQ(pass, 200);  // the lattice floor 1/100 already exceeds 0.001
}

// Reference permutation count: every permutation shuffles a plain copy of
// the centred doubles on the same jumped stream.
std::int64_t reference_exceedances(const std::vector<double>& x,
                                   std::size_t n_perm, const RandomStream& s) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = x[i] - mean;
  auto stat = [](const std::vector<double>& v) {
    double p = 0, best = 0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      p += v[k];
      best = std::max(best, std::fabs(p));
    }
    return best;
  };
  const double threshold = stat(c) * (1.0 - 1e-12);
  std::int64_t b = 0;
  for (std::size_t j = 0; j < n_perm; ++j) {
    auto v = c;
    RandomStream ps = s.jumped(j * v.size());
    shuffle(std::span<double>(v), ps);
    b += stat(v) >= threshold;
  }
  return b;
}

TEST(Cusum, CompactCodesMatchPlainPermutation) {
  RandomStream s = make_stream(MasterSeed{77}, 0);
  std::vector<double> few(300), many(300);
  for (std::size_t i = 0; i < few.size(); ++i) {
    few[i] = static_cast<double>(s.next_below(4)) + (i > 150 ? 0.4 : 0.0);
    many[i] = s.next_uniform() + (i > 150 ? 0.1 : 0.0);
  }
  const auto stream = make_stream(MasterSeed{5}, 0);
  for (const auto* x : {&few, &many}) {
    const auto r = cusum_changepoint(*x, 199, stream);
    EXPECT_EQ(detail<std::int64_t>(r, "exceedances"),
              reference_exceedances(*x, 199, stream));
  }
}

TEST(Classify, VerdictPriority) {
  const std::vector<double> clean = {0.5, 0.2}, hit = {0.5, 0.001};
  EXPECT_EQ(classify(clean, 0, 0.005), Verdict::kHomogeneous);
  EXPECT_EQ(classify(hit, 0, 0.005), Verdict::kInhomogeneous);
  EXPECT_EQ(classify(clean, 1, 0.005), Verdict::kInconclusive);
  EXPECT_EQ(classify(hit, 1, 0.005), Verdict::kInhomogeneous);
}

TEST(Classify, PureFunctionOfPValues) {
  HomogeneityReport a;
  a.results.push_back({"x", 1.0, std::nullopt, 0.004, {}});
  a.results.push_back({"y", 2.0, 3, 0.9, {}});
  HomogeneityReport b = a;
  b.results[0].statistic = 99.0;
  b.results[1].detail["anything"] = true;
  finalize(a, 0.01);
  finalize(b, 0.01);
  EXPECT_DOUBLE_EQ(a.corrected_alpha, 0.005);
  EXPECT_EQ(a.verdict, Verdict::kInhomogeneous);
  EXPECT_EQ(a.verdict, b.verdict);
}

RunSet device_runs(MasterSeed seed, std::size_t runs, std::size_t items,
                   const std::vector<double>& w) {
  RunSet rs;
  rs.m = static_cast<std::int32_t>(w.size());
  CategoricalSampler sampler(w);
  for (std::size_t r = 1; r <= runs; ++r) {
    RandomStream s = make_stream(seed, r);
    CategoricalOutcomes out(items);
    for (auto& o : out) o = static_cast<std::int32_t>(sampler(s)) + 1;
    rs.runs.push_back({static_cast<std::int64_t>(r), std::move(out)});
  }
  return rs;
}

TEST(Audit, Preconditions) {
  const auto s = make_stream(MasterSeed{0}, 0);
  EXPECT_EQ(kind_of([&] { audit(categorical({{1, 2}}, 2), 0.01, s); }),
            ErrorKind::kPrecondition);
  EXPECT_EQ(kind_of([&] { audit(categorical({{1, 2}, {2, 1}}, 2), 1.5, s); }),
            ErrorKind::kDomain);
}

TEST(Audit, ShortRunsAreInconclusive) {
  const auto r = audit(categorical({{1, 2, 1}, {2, 1, 2}}, 2), 0.01,
                       make_stream(MasterSeed{0}, 0));
  EXPECT_EQ(r.verdict, Verdict::kInconclusive);
  EXPECT_EQ(r.results.size(), 1u);
  EXPECT_EQ(r.failures.size(), 3u);
  EXPECT_DOUBLE_EQ(r.corrected_alpha, 0.01 / 4.0);
}

TEST(Audit, HomogeneousDeviceMostlyPasses) {
  const std::vector<double> w = {0.0, 0.0, 0.01, 0.98, 0.01, 0.0};
  int homogeneous = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto rs = device_runs(MasterSeed{rep}, 20, 2000, w);
    const auto r = audit(rs, 0.01, make_stream(MasterSeed{rep}, 0), {99});
    homogeneous += r.verdict == Verdict::kHomogeneous;
  }
  EXPECT_GE(homogeneous, 18);
}

TEST(Audit, MixedContextsDetected) {
  const std::vector<double> h = {0.0, 0.0, 0.01, 0.98, 0.01, 0.0};
  const std::vector<double> l = {0.01, 0.98, 0.01, 0.0, 0.0, 0.0};
  auto rs = device_runs(MasterSeed{3}, 4, 2000, h);
  auto other = device_runs(MasterSeed{4}, 4, 2000, l);
  for (std::size_t i = 0; i < other.runs.size(); i += 2) rs.runs[i] = other.runs[i];
  const auto r = audit(rs, 0.01, make_stream(MasterSeed{3}, 0), {99});
  EXPECT_EQ(r.verdict, Verdict::kInhomogeneous);
  EXPECT_EQ(r.results.front().name, "chi2_homogeneity");
}

TEST(Audit, RealValuedRunsUsePooledKs) {
  RunSet rs;
  for (std::uint64_t k = 1; k <= 3; ++k) {
    rs.runs.push_back({static_cast<std::int64_t>(k), uniforms(MasterSeed{9}, k, 100)});
  }
  const auto r = audit(rs, 0.05, make_stream(MasterSeed{9}, 0), {99});
  ASSERT_EQ(r.results.size(), 6u);
  EXPECT_EQ(r.results[0].name, "ks_two_sample:run=1");
  EXPECT_EQ(r.results[2].name, "ks_two_sample:run=3");
  EXPECT_EQ(std::get<std::int64_t>(r.results[0].detail.at("n_y")), 200);
}

TEST(Audit, ShiftedRunLowersChi2PValueOnAverage) {
  const std::vector<double> base = {0.2, 0.2, 0.2, 0.2, 0.2, 0.0};
  const std::vector<double> shifted = {0.15, 0.2, 0.2, 0.2, 0.25, 0.0};
  double mean_base = 0, mean_shifted = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    auto rs = device_runs(MasterSeed{rep}, 5, 500, base);
    mean_base += chi2_homogeneity(tabulate(rs)).p_value;
    auto extra = device_runs(MasterSeed{rep + 1000}, 1, 500, shifted);
    extra.runs[0].run_id = 6;
    rs.runs.push_back(extra.runs[0]);
    mean_shifted += chi2_homogeneity(tabulate(rs)).p_value;
  }
  EXPECT_LT(mean_shifted, mean_base);
}

TEST(Audit, ResultIndependentOfWorkerCount) {
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  const auto rs = device_runs(MasterSeed{8}, 3, 400, w);
  const auto a = audit(rs, 0.01, make_stream(MasterSeed{8}, 0), {199});
  set_worker_count(4);
  const auto b = audit(rs, 0.01, make_stream(MasterSeed{8}, 0), {199});
  set_worker_count(1);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace shl
