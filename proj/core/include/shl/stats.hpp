#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace shl {

/// Mean, sample standard deviation (n - 1 divisor) and SEM of a finite sample.
///
/// k_sigma = mean / sem is signed, so a one-sided null such as "J >= 0" is
/// rejected by large negative values. When s == 0 the ratio is undefined:
/// `degenerate` is set and k_sigma holds +inf, -inf or 0 following the sign of
/// the mean.
struct SignificanceSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double s = 0.0;
  double sem = 0.0;
  double k_sigma = 0.0;
  bool degenerate = false;

  friend bool operator==(const SignificanceSummary&,
                         const SignificanceSummary&) = default;
};

SignificanceSummary summarize(std::span<const double> sample);

/// Same as summarize() for a sample in which value levels[i] occurs
/// counts[i] times. Exact for discrete data and O(levels) instead of O(n).
SignificanceSummary summarize_grouped(std::span<const double> levels,
                                      std::span<const std::uint64_t> counts);

/// Two-sided Chebyshev lower bound on the confidence of a k-SEM deviation:
/// max(0, 1 - 1/k^2). Requires k > 0.
double chebyshev_confidence(double k);

/// One-sided Cantelli bound: 1 - 1/(1 + k^2). Requires k > 0.
double cantelli_confidence(double k);

using DetailValue = std::variant<bool, std::int64_t, double, std::string>;
using Detail = std::map<std::string, DetailValue>;

struct TestResult {
  std::string name;
  double statistic = 0.0;
  std::optional<std::int64_t> dof;
  double p_value = 1.0;
  Detail detail;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

}  // namespace shl
