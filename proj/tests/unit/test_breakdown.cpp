#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "shl/breakdown.hpp"
#include "shl/error.hpp"
#include "shl/homogeneity.hpp"
#include "shl/parallel.hpp"

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

// Mean and standard deviation of 1 - f(x) under a context, from the law.
std::pair<double, double> context_moments(const BreakdownConfig& cfg,
                                          const std::string& label) {
  const auto& p = cfg.context(label).probs;
  double m = 0, m2 = 0;
  for (std::size_t c = 0; c < kDeviceOutcomes; ++c) {
    const double v = 1.0 - cfg.f[c];
    m += p[c] * v;
    m2 += p[c] * v * v;
  }
  return {m, std::sqrt(m2 - m * m)};
}

TEST(DefaultConfig, Values) {
  const auto cfg = default_config();
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.runs, 100u);
  EXPECT_EQ(cfg.items_per_run, 100000u);
  EXPECT_EQ(cfg.f, (OutcomeWeights{0.86, 0.93, 1.00, 1.07, 1.14, 1.21}));
  const auto [mh, sh] = context_moments(cfg, "H");
  const auto [ml, sl] = context_moments(cfg, "L");
  EXPECT_NEAR(mh, -0.07, 1e-12);
  EXPECT_NEAR(ml, 0.07, 1e-12);
  EXPECT_NEAR(sh, 0.0098995, 1e-6);
  EXPECT_NEAR(sh, sl, 1e-12);
  // Expected deviation of a single run in SEM units.
  EXPECT_GT(std::fabs(mh) * std::sqrt(1e5) / sh, 2000.0);
}

TEST(DefaultConfig, Schedule) {
  const auto s = default_schedule(100);
  EXPECT_EQ(s[24], "H");
  EXPECT_EQ(s[49], "H");
  EXPECT_EQ(s[74], "H");
  EXPECT_EQ(s[48], "L");
  EXPECT_EQ(s[0], "H");
  EXPECT_EQ(s[1], "L");
  EXPECT_EQ(std::count(s.begin(), s.end(), "H"), 50);
  const auto short_schedule = default_schedule(3);
  EXPECT_EQ(short_schedule, (std::vector<std::string>{"H", "L", "H"}));
}

TEST(Config, ValidationErrors) {
  auto bad = default_config();
  bad.contexts[0].probs[0] = 0.001;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInvalidConfig);
  bad = default_config();
  bad.schedule[3] = "Q";
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInvalidConfig);
  bad = default_config();
  bad.schedule.pop_back();
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInvalidConfig);
  bad = default_config();
  bad.items_per_run = 1;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInvalidConfig);
}

TEST(BStatistic, Examples) {
  const auto f = default_config().f;
  const std::vector<std::int32_t> threes(50, 3), fours = {4, 4}, mixed = {2, 4};
  EXPECT_DOUBLE_EQ(b_statistic(f, threes), 1.0);
  EXPECT_DOUBLE_EQ(b_statistic(f, fours), 1.07);
  EXPECT_NEAR(b_statistic(f, mixed), 1.0, 1e-15);
  EXPECT_EQ(kind_of([&] { b_statistic(f, std::vector<std::int32_t>{}); }),
            ErrorKind::kInsufficientSample);
  EXPECT_EQ(kind_of([&] { b_statistic(f, std::vector<std::int32_t>{7}); }),
            ErrorKind::kPrecondition);
}

TEST(BStatistic, Linearity) {
  const auto f = default_config().f;
  RandomStream s = make_stream(MasterSeed{3}, 0);
  std::vector<std::int32_t> x(1000);
  for (auto& v : x) v = static_cast<std::int32_t>(s.next_below(6)) + 1;
  for (const auto [a, c] : {std::pair{2.0, 0.5}, std::pair{-1.0, 3.0},
                            std::pair{0.25, -7.0}}) {
    OutcomeWeights g{};
    for (std::size_t i = 0; i < 6; ++i) g[i] = a * f[i] + c;
    EXPECT_NEAR(b_statistic(g, x), a * b_statistic(f, x) + c, 1e-12);
  }
}

class DefaultExperiment : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    result_ = new BreakdownResult(run_experiment(default_config(), MasterSeed{1}));
  }
  static void TearDownTestSuite() { delete result_; }
  static BreakdownResult* result_;
};
BreakdownResult* DefaultExperiment::result_ = nullptr;

TEST_F(DefaultExperiment, DesignatedRunsViolateByThousandsOfSem) {
  for (const int run : {25, 50, 75}) {
    const auto& r = result_->per_run[run - 1];
    EXPECT_EQ(r.run_id, run);
    EXPECT_EQ(r.context, "H");
    EXPECT_LE(r.k_sigma, -2000.0);
    EXPECT_NEAR(r.k_sigma, -2236.0, 60.0);
  }
}

TEST_F(DefaultExperiment, PooledCompatibleWithNull) {
  EXPECT_EQ(result_->pooled.n, 100u * 100000u);
  EXPECT_LE(std::fabs(result_->pooled.k_sigma), 3.0);
}

TEST_F(DefaultExperiment, PooledMeanIsWeightedRunMean) {
  double weighted = 0.0;
  for (const auto& r : result_->per_run) {
    weighted += r.one_minus_b * static_cast<double>(r.summary.n);
  }
  EXPECT_NEAR(result_->pooled.mean, weighted / result_->pooled.n, 1e-15);
}

TEST_F(DefaultExperiment, RunSetMatchesSummaries) {
  const auto& rs = result_->runset;
  ASSERT_EQ(rs.runs.size(), 100u);
  const auto table = tabulate(rs);
  const auto f = default_config().f;
  for (std::size_t k = 0; k < 100; ++k) {
    EXPECT_EQ(table.row_sum(k), 100000u);
    const auto& out = std::get<CategoricalOutcomes>(rs.runs[k].outcomes);
    EXPECT_NEAR(1.0 - b_statistic(f, out), result_->per_run[k].one_minus_b, 1e-12);
  }
}

TEST_F(DefaultExperiment, Chi2ExceedsAnalyticBound) {
  // Noncentrality n * sum_k sum_c (p_kc - pbar_c)^2 / pbar_c over surviving
  // columns; the statistic concentrates around it.
  const auto cfg = default_config();
  std::array<double, kDeviceOutcomes> pbar{};
  for (const auto& label : cfg.schedule)
    for (std::size_t c = 0; c < kDeviceOutcomes; ++c)
      pbar[c] += cfg.context(label).probs[c] / cfg.runs;
  double lambda = 0.0;
  for (const auto& label : cfg.schedule)
    for (std::size_t c = 0; c < kDeviceOutcomes; ++c)
      if (pbar[c] > 0) {
        const double d = cfg.context(label).probs[c] - pbar[c];
        lambda += cfg.items_per_run * d * d / pbar[c];
      }
  EXPECT_NEAR(lambda, 9.9e6, 1.0);
  const auto r = chi2_homogeneity(tabulate(result_->runset));
  EXPECT_GT(r.statistic, 1e6);
  EXPECT_GT(r.statistic, 0.95 * lambda);
  EXPECT_EQ(r.dof, 99 * 4);
  EXPECT_LT(r.p_value, 1e-300);
  EXPECT_EQ(std::get<std::string>(r.detail.at("dropped_columns")), "6");
}

TEST_F(DefaultExperiment, AuditFindsInhomogeneity) {
  const auto report =
      audit(result_->runset, 0.01, make_stream(MasterSeed{1}, 0), {99});
  EXPECT_EQ(report.verdict, Verdict::kInhomogeneous);
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  auto cfg = default_config();
  cfg.runs = 12;
  cfg.items_per_run = 5000;
  cfg.schedule = default_schedule(12);
  const auto a = run_experiment(cfg, MasterSeed{42});
  set_worker_count(3);
  const auto b = run_experiment(cfg, MasterSeed{42});
  set_worker_count(1);
  for (std::size_t k = 0; k < 12; ++k) {
    EXPECT_EQ(a.runset.runs[k].outcomes, b.runset.runs[k].outcomes);
    EXPECT_EQ(a.per_run[k].summary, b.per_run[k].summary);
  }
  EXPECT_EQ(a.pooled, b.pooled);
}

TEST(Experiment, SingleContextIsHomogeneousAndViolating) {
  auto cfg = default_config();
  cfg.runs = 20;
  cfg.items_per_run = 10000;
  cfg.schedule.assign(20, "H");
  const auto r = run_experiment(cfg, MasterSeed{5});
  EXPECT_LT(r.pooled.k_sigma, -2000.0);
  const auto report = audit(r.runset, 0.01, make_stream(MasterSeed{5}, 0), {99});
  EXPECT_EQ(report.verdict, Verdict::kHomogeneous);
}

TEST(Experiment, RunsAreIndependentWithin) {
  auto cfg = default_config();
  cfg.runs = 1;
  cfg.items_per_run = 10000;
  cfg.schedule = {"H"};
  int runs_pass = 0, lag_pass = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = run_experiment(cfg, MasterSeed{seed});
    const auto& out = std::get<CategoricalOutcomes>(r.runset.runs[0].outcomes);
    std::vector<double> fx(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) fx[i] = cfg.f[out[i] - 1];
    // Most values sit at the median; the runs test only sees the tails.
    runs_pass += runs_test(fx).p_value > 0.001;
    lag_pass += lag1_autocorr_test(fx).p_value > 0.001;
  }
  EXPECT_GE(runs_pass, 99);
  EXPECT_GE(lag_pass, 99);
}

}  // namespace
}  // namespace shl
