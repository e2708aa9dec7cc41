#include "shl/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "shl/error.hpp"

namespace shl {
namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// ln of x^a e^-x / Gamma(a), the common prefactor of P and Q.
double log_prefactor(double a, double x) {
  return a * std::log(x) - x - log_gamma(a);
}

// Series for P(a, x) without the prefactor.
double gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum;
}

// Modified Lentz continued fraction for Q(a, x) without the prefactor.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw Error(ErrorKind::kDomain, "incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw Error(ErrorKind::kDomain, "incomplete gamma needs x >= 0");
}

void check_chi2_args(double x, long long dof) {
  if (!(x >= 0.0)) {
    throw Error(ErrorKind::kDomain,
                "chi2_sf needs x >= 0, got " + std::to_string(x));
  }
  if (dof < 1) {
    throw Error(ErrorKind::kDomain,
                "chi2_sf needs dof >= 1, got " + std::to_string(dof));
  }
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::kDomain, "log_gamma needs x > 0");
  if (x < 0.5) {
    // Reflection keeps the Lanczos sum in its accurate range.
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    sum += kLanczos[i] / (z + static_cast<double>(i));
  }
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) -
         t + std::log(sum);
}

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::exp(log_prefactor(a, x)) * gamma_series(a, x);
  return 1.0 - std::exp(log_prefactor(a, x)) * gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    return 1.0 - std::exp(log_prefactor(a, x)) * gamma_series(a, x);
  }
  return std::exp(log_prefactor(a, x)) * gamma_continued_fraction(a, x);
}

double log_regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::log(regularized_gamma_q(a, x));
  return log_prefactor(a, x) + std::log(gamma_continued_fraction(a, x));
}

double chi2_sf(double x, long long dof) {
  check_chi2_args(x, dof);
  return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

double chi2_log_sf(double x, long long dof) {
  check_chi2_args(x, dof);
  return log_regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

double kolmogorov_sf(double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error(ErrorKind::kDomain, "kolmogorov_sf needs lambda >= 0");
  }
  if (lambda == 0.0) return 1.0;
  if (lambda < 1.18) {
    // The alternating series cancels badly for small lambda; use the
    // Jacobi-dual form P = sqrt(2 pi)/l * sum exp(-(2j-1)^2 pi^2 / (8 l^2)).
    const double scale = -std::numbers::pi * std::numbers::pi /
                         (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double odd = 2.0 * j - 1.0;
      const double term = std::exp(scale * odd * odd);
      sum += term;
      if (term < 1e-17 * sum || term == 0.0) break;
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double normal_sf(double z) {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

}  // namespace shl
