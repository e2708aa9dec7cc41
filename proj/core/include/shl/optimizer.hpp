#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "shl/eberhard.hpp"
#include "shl/rng.hpp"

namespace shl {

struct OptResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  /// Offset of the initial simplex vertices along each axis from x0.
  double initial_step = 0.1;
};

/// Downhill simplex with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5. Converged once the spread of objective values across the
/// simplex drops below tol; running out of iterations is reported through
/// `converged`, not an exception.
OptResult nelder_mead(const Objective& objective, std::vector<double> x0,
                      const NelderMeadOptions& options);

OptResult nelder_mead(const Objective& objective, std::vector<double> x0,
                      double tol, std::size_t max_iter);

/// Parameter vector layout for optimize_settings: (alpha1, alpha2, beta1,
/// beta2, r).
inline constexpr std::size_t kSettingsDimension = 5;
inline constexpr double kMinEntanglement = 0.01;

/// Config with the angles and r taken from x (r clamped to [0.01, 1]).
EberhardConfig settings_config(std::span<const double> x, double eta);

/// Minimizes expected_j_per_pair over (alpha1, alpha2, beta1, beta2, r) for a
/// fixed efficiency. Restart k starts from a point drawn on stream k; the
/// best restart wins. Angles come back reduced to [0, pi).
OptResult optimize_settings(double eta, std::size_t multistart,
                            MasterSeed seed);

}  // namespace shl
