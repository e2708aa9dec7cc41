#pragma once

// Tests for the two conditions of a simple random sample: identical
// distribution across runs (chi-square, two-sample KS, CUSUM) and independence
// within runs (Wald-Wolfowitz runs, lag-1 autocorrelation), plus the audit
// that combines them under a Bonferroni correction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shl/rng.hpp"
#include "shl/stats.hpp"

namespace shl {

using CategoricalOutcomes = std::vector<std::int32_t>;
using RealOutcomes = std::vector<double>;

struct RunSample {
  std::int64_t run_id = 0;
  std::variant<CategoricalOutcomes, RealOutcomes> outcomes;

  bool is_categorical() const noexcept {
    return std::holds_alternative<CategoricalOutcomes>(outcomes);
  }
  std::size_t size() const noexcept;
};

struct RunSet {
  std::vector<RunSample> runs;
  /// Number of categories (categories are 1..m); unused for real-valued runs.
  std::int32_t m = 0;

  std::size_t total_size() const noexcept;
};

/// K x m table of non-negative counts, row-major.
class ContingencyTable {
 public:
  ContingencyTable() = default;
  ContingencyTable(std::size_t rows, std::size_t cols);
  explicit ContingencyTable(
      const std::vector<std::vector<std::uint64_t>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t& at(std::size_t r, std::size_t c) {
    return counts_[r * cols_ + c];
  }
  std::uint64_t at(std::size_t r, std::size_t c) const {
    return counts_[r * cols_ + c];
  }
  std::uint64_t row_sum(std::size_t r) const;
  std::uint64_t col_sum(std::size_t c) const;

  friend bool operator==(const ContingencyTable&,
                         const ContingencyTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> counts_;
};

enum class Verdict { kHomogeneous, kInhomogeneous, kInconclusive };

std::string_view to_string(Verdict verdict) noexcept;

struct TestFailure {
  std::string name;
  std::string error;
  std::string message;

  friend bool operator==(const TestFailure&, const TestFailure&) = default;
};

struct HomogeneityReport {
  std::vector<TestResult> results;
  std::vector<TestFailure> failures;
  double alpha = 0.01;
  double corrected_alpha = 0.01;
  Verdict verdict = Verdict::kHomogeneous;

  friend bool operator==(const HomogeneityReport&,
                         const HomogeneityReport&) = default;
};

/// Verdict as a pure function of the per-test p-values: INHOMOGENEOUS if any
/// p < corrected_alpha, otherwise INCONCLUSIVE if any test errored, otherwise
/// HOMOGENEOUS.
Verdict classify(std::span<const double> p_values, std::size_t errored,
                 double corrected_alpha) noexcept;

/// Fills corrected_alpha = alpha / (#results + #failures) and the verdict.
void finalize(HomogeneityReport& report, double alpha);

ContingencyTable tabulate(const RunSet& runs);

/// Pearson chi-square test of homogeneity across table rows. Columns with a
/// zero total are dropped first; expected cells below 1 are flagged in the
/// detail rather than rejected.
TestResult chi2_homogeneity(const ContingencyTable& table);

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Wald-Wolfowitz runs above/below the median; exact-median values dropped.
TestResult runs_test(std::span<const double> x);

TestResult lag1_autocorr_test(std::span<const double> x);

/// Maximum absolute centred cumulative sum, with a permutation p-value
/// (b + 1) / (n_perm + 1). Permutation j draws from `stream` jumped by
/// j * x.size(), so the result does not depend on the worker count.
TestResult cusum_changepoint(std::span<const double> x, std::size_t n_perm,
                             const RandomStream& stream);

struct AuditOptions {
  // 1 / (n_perm + 1) = 0.002 stays below alpha / 4 at alpha = 0.01, so the
  // permutation test can still reject after the Bonferroni correction.
  std::size_t n_perm = 499;
};

/// Runs the full battery on a RunSet: chi-square across runs (categorical) or
/// each run against the pooled remainder with KS (real-valued), then runs,
/// lag-1 and CUSUM tests on the concatenated sequence.
HomogeneityReport audit(const RunSet& runs, double alpha,
                        const RandomStream& stream,
                        const AuditOptions& options = {});

/// Concatenation of all runs in order, categorical codes converted to double.
std::vector<double> concatenate(const RunSet& runs);

inline constexpr std::size_t kRunsTestMinLength = 20;
inline constexpr std::size_t kLag1MinLength = 30;
inline constexpr std::size_t kCusumMinLength = 50;
inline constexpr std::size_t kCusumMinPermutations = 99;

}  // namespace shl
