#include "shl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shl/error.hpp"

namespace shl {
namespace {

SignificanceSummary finish(std::size_t n, double mean, double s) {
  SignificanceSummary out;
  out.n = n;
  out.mean = mean;
  out.s = s;
  out.sem = s / std::sqrt(static_cast<double>(n));
  if (out.sem > 0.0) {
    out.k_sigma = mean / out.sem;
  } else {
    out.degenerate = true;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    out.k_sigma = mean > 0.0 ? kInf : (mean < 0.0 ? -kInf : 0.0);
  }
  return out;
}

void require_positive(double k, const char* what) {
  if (!(k > 0.0)) {
    throw Error(ErrorKind::kDomain,
                std::string(what) + " requires k > 0, got " +
                    std::to_string(k));
  }
}

}  // namespace

SignificanceSummary summarize(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) {
    throw Error(ErrorKind::kInsufficientSample,
                "summary needs at least 2 values, got " + std::to_string(n));
  }
  // Neumaier-compensated mean, then corrected two-pass variance.
  double sum = 0.0;
  double comp = 0.0;
  for (const double x : sample) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  const double mean = (sum + comp) / static_cast<double>(n);

  double ss = 0.0;
  double drift = 0.0;
  for (const double x : sample) {
    const double d = x - mean;
    ss += d * d;
    drift += d;
  }
  ss -= drift * drift / static_cast<double>(n);
  const double s = std::sqrt(std::max(ss, 0.0) / static_cast<double>(n - 1));
  return finish(n, mean, s);
}

SignificanceSummary summarize_grouped(std::span<const double> levels,
                                      std::span<const std::uint64_t> counts) {
  if (levels.size() != counts.size()) {
    throw Error(ErrorKind::kPrecondition, "levels and counts differ in length");
  }
  std::uint64_t n = 0;
  for (const auto c : counts) n += c;
  if (n < 2) {
    throw Error(ErrorKind::kInsufficientSample,
                "summary needs at least 2 values, got " + std::to_string(n));
  }
  const double dn = static_cast<double>(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    mean += static_cast<double>(counts[i]) * levels[i];
  }
  mean /= dn;
  double ss = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double d = levels[i] - mean;
    ss += static_cast<double>(counts[i]) * d * d;
  }
  return finish(static_cast<std::size_t>(n), mean, std::sqrt(ss / (dn - 1.0)));
}

double chebyshev_confidence(double k) {
  require_positive(k, "chebyshev_confidence");
  return std::max(0.0, 1.0 - 1.0 / (k * k));
}

double cantelli_confidence(double k) {
  require_positive(k, "cantelli_confidence");
  return 1.0 - 1.0 / (1.0 + k * k);
}

}  // namespace shl
