#pragma once

// Special functions behind the p-values. Implemented here rather than pulled
// from a numerics package so results are identical on every platform that
// shares the C++ standard library's exp/log/erfc.

namespace shl {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, nine terms; relative error ~1e-15).
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x). Uses the power series for
/// x < a + 1 and a Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// ln Q(a, x); finite even where Q itself underflows.
double log_regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution. x >= 0, dof >= 1.
double chi2_sf(double x, long long dof);

/// ln chi2_sf(x, dof), for reporting p-values below the double range.
double chi2_log_sf(double x, long long dof);

/// Asymptotic Kolmogorov survival function
/// Q(l) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 l^2), clamped to [0, 1].
double kolmogorov_sf(double lambda);

/// 1 - Phi(z) through erfc.
double normal_sf(double z);

}  // namespace shl
