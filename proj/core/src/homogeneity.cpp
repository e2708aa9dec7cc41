#include "shl/homogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

#include "shl/distributions.hpp"
#include "shl/error.hpp"
#include "shl/parallel.hpp"

namespace shl {
namespace {

std::string join_indices(const std::vector<std::size_t>& indices) {
  std::string out;
  for (const auto i : indices) {
    if (!out.empty()) out += ',';
    out += std::to_string(i);
  }
  return out;
}

double mean_of(std::span<const double> x) {
  double sum = 0.0;
  for (const double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double two_sided_normal_p(double z) {
  return std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
}

// max_k |S_k| over k = 1..n-1. With an empty level table the values are
// used directly, otherwise each element is an index into `levels`.
template <typename T>
double max_abs_partial_sum(std::span<const T> values,
                           std::span<const double> levels,
                           std::size_t* argmax) {
  double partial = 0.0;
  double best = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    if constexpr (std::is_same_v<T, double>) {
      partial += levels.empty() ? values[k] : levels[static_cast<std::size_t>(values[k])];
    } else {
      partial += levels[values[k]];
    }
    const double a = std::fabs(partial);
    if (a > best) {
      best = a;
      best_k = k + 1;
    }
  }
  if (argmax != nullptr) *argmax = best_k;
  return best;
}

template <typename T>
double max_abs_partial_sum(const std::vector<T>& values,
                           std::span<const double> levels,
                           std::size_t* argmax) {
  return max_abs_partial_sum(std::span<const T>(values), levels, argmax);
}

}  // namespace

std::size_t RunSample::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, outcomes);
}

std::size_t RunSet::total_size() const noexcept {
  std::size_t total = 0;
  for (const auto& run : runs) total += run.size();
  return total;
}

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), counts_(rows * cols, 0) {}

ContingencyTable::ContingencyTable(
    const std::vector<std::vector<std::uint64_t>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
  counts_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw Error(ErrorKind::kPrecondition, "ragged contingency table");
    }
    counts_.insert(counts_.end(), row.begin(), row.end());
  }
}

std::uint64_t ContingencyTable::row_sum(std::size_t r) const {
  std::uint64_t sum = 0;
  for (std::size_t c = 0; c < cols_; ++c) sum += at(r, c);
  return sum;
}

std::uint64_t ContingencyTable::col_sum(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t r = 0; r < rows_; ++r) sum += at(r, c);
  return sum;
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::kHomogeneous: return "HOMOGENEOUS";
    case Verdict::kInhomogeneous: return "INHOMOGENEOUS";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

Verdict classify(std::span<const double> p_values, std::size_t errored,
                 double corrected_alpha) noexcept {
  for (const double p : p_values) {
    if (p < corrected_alpha) return Verdict::kInhomogeneous;
  }
  return errored > 0 ? Verdict::kInconclusive : Verdict::kHomogeneous;
}

void finalize(HomogeneityReport& report, double alpha) {
  report.alpha = alpha;
  const std::size_t tests = report.results.size() + report.failures.size();
  report.corrected_alpha = tests > 0 ? alpha / static_cast<double>(tests)
                                     : alpha;
  std::vector<double> p_values;
  p_values.reserve(report.results.size());
  for (const auto& r : report.results) p_values.push_back(r.p_value);
  report.verdict =
      classify(p_values, report.failures.size(), report.corrected_alpha);
}

ContingencyTable tabulate(const RunSet& rs) {
  if (rs.runs.size() < 2) {
    throw Error(ErrorKind::kPrecondition,
                "homogeneity testing needs at least 2 runs, got " +
                    std::to_string(rs.runs.size()));
  }
  if (rs.m < 1) {
    throw Error(ErrorKind::kPrecondition, "category count m must be >= 1");
  }
  ContingencyTable table(rs.runs.size(), static_cast<std::size_t>(rs.m));
  for (std::size_t r = 0; r < rs.runs.size(); ++r) {
    const auto* outcomes = std::get_if<CategoricalOutcomes>(&rs.runs[r].outcomes);
    if (outcomes == nullptr) {
      throw Error(ErrorKind::kType,
                  "run " + std::to_string(rs.runs[r].run_id) +
                      " is real-valued; tabulate needs categorical runs");
    }
    for (const auto c : *outcomes) {
      if (c < 1 || c > rs.m) {
        throw Error(ErrorKind::kPrecondition,
                    "category " + std::to_string(c) + " outside 1.." +
                        std::to_string(rs.m));
      }
      ++table.at(r, static_cast<std::size_t>(c - 1));
    }
  }
  return table;
}

TestResult chi2_homogeneity(const ContingencyTable& table) {
  if (table.rows() < 2) {
    throw Error(ErrorKind::kPrecondition,
                "chi-square homogeneity needs at least 2 rows");
  }
  std::vector<std::size_t> kept_rows, kept_cols, dropped_rows, dropped_cols;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    (table.row_sum(r) > 0 ? kept_rows : dropped_rows).push_back(r);
  }
  for (std::size_t c = 0; c < table.cols(); ++c) {
    (table.col_sum(c) > 0 ? kept_cols : dropped_cols).push_back(c);
  }
  if (kept_cols.size() < 2) {
    throw Error(ErrorKind::kDegenerateTable,
                "fewer than 2 columns with non-zero totals");
  }
  if (kept_rows.size() < 2) {
    throw Error(ErrorKind::kDegenerateTable,
                "fewer than 2 rows with non-zero totals");
  }

  std::vector<double> row_totals, col_totals;
  for (const auto r : kept_rows) row_totals.push_back(static_cast<double>(table.row_sum(r)));
  for (const auto c : kept_cols) col_totals.push_back(static_cast<double>(table.col_sum(c)));
  double grand = 0.0;
  for (const double t : row_totals) grand += t;

  double statistic = 0.0;
  double min_expected = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kept_rows.size(); ++i) {
    for (std::size_t j = 0; j < kept_cols.size(); ++j) {
      const double expected = row_totals[i] * col_totals[j] / grand;
      const double diff =
          static_cast<double>(table.at(kept_rows[i], kept_cols[j])) - expected;
      statistic += diff * diff / expected;
      min_expected = std::min(min_expected, expected);
    }
  }
  const auto dof = static_cast<std::int64_t>((kept_rows.size() - 1) *
                                             (kept_cols.size() - 1));

  TestResult result;
  result.name = "chi2_homogeneity";
  result.statistic = statistic;
  result.dof = dof;
  result.p_value = chi2_sf(statistic, dof);
  result.detail["min_expected"] = min_expected;
  result.detail["low_expected_warning"] = min_expected < 1.0;
  result.detail["log10_p"] = chi2_log_sf(statistic, dof) / std::numbers::ln10;
  result.detail["p_underflow"] = result.p_value < 1e-300;
  // Category columns are reported 1-based, runs by table row (0-based).
  std::vector<std::size_t> dropped_categories;
  for (const auto c : dropped_cols) dropped_categories.push_back(c + 1);
  result.detail["dropped_columns"] = join_indices(dropped_categories);
  result.detail["dropped_rows"] = join_indices(dropped_rows);
  return result;
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) {
    throw Error(ErrorKind::kInsufficientSample,
                "two-sample KS needs non-empty samples");
  }
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());

  // Both ECDFs are evaluated after consuming every copy of the next support
  // point, which handles ties within and across samples.
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx -
                              static_cast<double>(j) / ny));
  }

  const double lambda = d * std::sqrt(nx * ny / (nx + ny));
  TestResult result;
  result.name = "ks_two_sample";
  result.statistic = d;
  result.p_value = kolmogorov_sf(lambda);
  result.detail["n_x"] = static_cast<std::int64_t>(xs.size());
  result.detail["n_y"] = static_cast<std::int64_t>(ys.size());
  result.detail["lambda"] = lambda;
  return result;
}

TestResult runs_test(std::span<const double> x) {
  if (x.size() < kRunsTestMinLength) {
    throw Error(ErrorKind::kInsufficientSample,
                "runs test needs at least " +
                    std::to_string(kRunsTestMinLength) + " values, got " +
                    std::to_string(x.size()));
  }
  std::vector<double> sorted(x.begin(), x.end());
  const std::size_t half = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + half, sorted.end());
  double median = sorted[half];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + half);
    median = 0.5 * (lower + median);
  }

  std::size_t above = 0, below = 0, runs = 0, ties = 0;
  int previous = 0;
  for (const double v : x) {
    if (v == median) {
      ++ties;
      continue;
    }
    const int side = v > median ? 1 : -1;
    (side > 0 ? above : below) += 1;
    if (side != previous) ++runs;
    previous = side;
  }
  if (above == 0 || below == 0) {
    throw Error(ErrorKind::kDegenerateSequence,
                "runs test needs values on both sides of the median");
  }

  const double n1 = static_cast<double>(above);
  const double n2 = static_cast<double>(below);
  const double n = n1 + n2;
  const double expected = 2.0 * n1 * n2 / n + 1.0;
  const double variance =
      2.0 * n1 * n2 * (2.0 * n1 * n2 - n1 - n2) / (n * n * (n - 1.0));
  if (!(variance > 0.0)) {
    throw Error(ErrorKind::kDegenerateSequence,
                "runs test variance is zero for this split");
  }
  const double z = (static_cast<double>(runs) - expected) / std::sqrt(variance);

  TestResult result;
  result.name = "runs_test";
  result.statistic = static_cast<double>(runs);
  result.p_value = two_sided_normal_p(z);
  result.detail["z"] = z;
  result.detail["expected_runs"] = expected;
  result.detail["sd_runs"] = std::sqrt(variance);
  result.detail["n_above"] = static_cast<std::int64_t>(above);
  result.detail["n_below"] = static_cast<std::int64_t>(below);
  result.detail["median"] = median;
  result.detail["discarded_ties"] = static_cast<std::int64_t>(ties);
  return result;
}

TestResult lag1_autocorr_test(std::span<const double> x) {
  if (x.size() < kLag1MinLength) {
    throw Error(ErrorKind::kInsufficientSample,
                "lag-1 autocorrelation test needs at least " +
                    std::to_string(kLag1MinLength) + " values, got " +
                    std::to_string(x.size()));
  }
  const double mean = mean_of(x);
  double denominator = 0.0;
  double numerator = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean;
    denominator += d * d;
    if (i + 1 < x.size()) numerator += d * (x[i + 1] - mean);
  }
  if (!(denominator > 0.0)) {
    throw Error(ErrorKind::kDegenerateSequence, "zero variance sequence");
  }
  const double r1 = numerator / denominator;
  const double z = r1 * std::sqrt(static_cast<double>(x.size()));
  const double ratio = (1.0 + r1) / (1.0 - r1);
  const double inflation =
      r1 >= 1.0 ? std::numeric_limits<double>::infinity()
                : std::sqrt(std::max(0.0, ratio));

  TestResult result;
  result.name = "lag1_autocorr";
  result.statistic = r1;
  result.p_value = two_sided_normal_p(z);
  result.detail["z"] = z;
  result.detail["sem_inflation"] = inflation;
  return result;
}

TestResult cusum_changepoint(std::span<const double> x, std::size_t n_perm,
                             const RandomStream& stream) {
  if (x.size() < kCusumMinLength) {
    throw Error(ErrorKind::kInsufficientSample,
                "CUSUM test needs at least " + std::to_string(kCusumMinLength) +
                    " values, got " + std::to_string(x.size()));
  }
  if (n_perm < kCusumMinPermutations) {
    throw Error(ErrorKind::kPrecondition,
                "CUSUM test needs at least " +
                    std::to_string(kCusumMinPermutations) + " permutations");
  }
  const double mean = mean_of(x);
  std::vector<double> centred(x.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    centred[i] = x[i] - mean;
    ss += centred[i] * centred[i];
  }
  if (!(ss > 0.0)) {
    throw Error(ErrorKind::kDegenerateSequence, "zero variance sequence");
  }

  std::size_t change_point = 0;
  const double observed =
      max_abs_partial_sum(centred, std::span<const double>{}, &change_point);
  const double threshold = observed * (1.0 - 1e-12);

  const std::size_t workers =
      std::min<std::size_t>(worker_count(), n_perm);
  std::vector<std::size_t> exceed(workers, 0);

  // Discrete data is permuted as small level codes: the draws and the
  // summation order match the plain path, only the memory traffic shrinks.
  std::vector<double> levels(centred);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto code_of = [&](double v) {
    return static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), v) - levels.begin());
  };

  auto run_permutations = [&]<typename Code>(const std::vector<Code>& codes) {
    parallel_for(workers, [&](std::size_t w) {
      std::vector<Code> buffer(codes.size());
      for (std::size_t j = w; j < n_perm; j += workers) {
        std::copy(codes.begin(), codes.end(), buffer.begin());
        RandomStream perm_stream = stream.jumped(j * codes.size());
        shuffle(std::span<Code>(buffer), perm_stream);
        if (max_abs_partial_sum(buffer, levels, nullptr) >= threshold) {
          ++exceed[w];
        }
      }
    });
  };

  if (levels.size() <= 256) {
    std::vector<std::uint8_t> codes(centred.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      codes[i] = static_cast<std::uint8_t>(code_of(centred[i]));
    }
    run_permutations(codes);
  } else if (levels.size() <= 65536) {
    std::vector<std::uint16_t> codes(centred.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      codes[i] = static_cast<std::uint16_t>(code_of(centred[i]));
    }
    run_permutations(codes);
  } else {
    levels.clear();
    run_permutations(centred);
  }
  std::size_t b = 0;
  for (const auto e : exceed) b += e;

  TestResult result;
  result.name = "cusum_changepoint";
  result.statistic = observed;
  result.p_value =
      static_cast<double>(b + 1) / static_cast<double>(n_perm + 1);
  result.detail["change_point"] = static_cast<std::int64_t>(change_point);
  result.detail["n_perm"] = static_cast<std::int64_t>(n_perm);
  result.detail["exceedances"] = static_cast<std::int64_t>(b);
  return result;
}

std::vector<double> concatenate(const RunSet& rs) {
  std::vector<double> out;
  out.reserve(rs.total_size());
  for (const auto& run : rs.runs) {
    std::visit(
        [&](const auto& values) {
          for (const auto v : values) out.push_back(static_cast<double>(v));
        },
        run.outcomes);
  }
  return out;
}

HomogeneityReport audit(const RunSet& rs, double alpha,
                        const RandomStream& stream,
                        const AuditOptions& options) {
  if (rs.runs.size() < 2) {
    throw Error(ErrorKind::kPrecondition,
                "audit needs at least 2 runs, got " +
                    std::to_string(rs.runs.size()));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::kDomain, "alpha must lie in (0, 1)");
  }
  const bool categorical = rs.runs.front().is_categorical();
  for (const auto& run : rs.runs) {
    if (run.is_categorical() != categorical) {
      throw Error(ErrorKind::kType, "RunSet mixes categorical and real runs");
    }
  }

  HomogeneityReport report;
  auto attempt = [&](const std::string& name, auto&& test) {
    try {
      TestResult r = test();
      r.name = name;
      report.results.push_back(std::move(r));
    } catch (const Error& e) {
      report.failures.push_back(
          {name, std::string(to_string(e.kind())), e.what()});
    }
  };

  if (categorical) {
    attempt("chi2_homogeneity", [&] { return chi2_homogeneity(tabulate(rs)); });
  } else {
    for (std::size_t k = 0; k < rs.runs.size(); ++k) {
      const auto& run = std::get<RealOutcomes>(rs.runs[k].outcomes);
      RealOutcomes rest;
      rest.reserve(rs.total_size() - run.size());
      for (std::size_t other = 0; other < rs.runs.size(); ++other) {
        if (other == k) continue;
        const auto& values = std::get<RealOutcomes>(rs.runs[other].outcomes);
        rest.insert(rest.end(), values.begin(), values.end());
      }
      attempt("ks_two_sample:run=" + std::to_string(rs.runs[k].run_id),
              [&] { return ks_two_sample(run, rest); });
    }
  }

  const std::vector<double> sequence = concatenate(rs);
  attempt("runs_test", [&] { return runs_test(sequence); });
  attempt("lag1_autocorr", [&] { return lag1_autocorr_test(sequence); });
  attempt("cusum_changepoint",
          [&] { return cusum_changepoint(sequence, options.n_perm, stream); });

  finalize(report, alpha);
  return report;
}

}  // namespace shl
