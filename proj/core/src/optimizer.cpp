#include "shl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "shl/error.hpp"
#include "shl/parallel.hpp"

namespace shl {
namespace {

using Point = std::vector<double>;

Point affine(const Point& base, const Point& toward, double t) {
  Point p(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    p[i] = base[i] + t * (toward[i] - base[i]);
  }
  return p;
}

double reduce_angle(double angle) {
  double a = std::fmod(angle, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a = 0.0;
  return a;
}

}  // namespace

OptResult nelder_mead(const Objective& objective, std::vector<double> x0,
                      const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(ErrorKind::kPrecondition, "dimension must be >= 1");
  if (!(options.tol > 0.0)) throw Error(ErrorKind::kDomain, "tol must be > 0");

  std::vector<Point> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = objective(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    std::vector<Point> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = std::move(simplex[order[i]]);
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  OptResult result;
  std::size_t iter = 0;
  for (;;) {
    sort_simplex();
    if (values[n] - values[0] < options.tol) {
      result.converged = true;
      break;
    }
    if (iter >= options.max_iter) break;
    ++iter;

    Point centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    const Point& worst = simplex[n];
    Point reflected = affine(centroid, worst, -1.0);
    const double f_reflected = objective(reflected);

    if (f_reflected < values[0]) {
      Point expanded = affine(centroid, worst, -2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex[n] = std::move(expanded);
        values[n] = f_expanded;
      } else {
        simplex[n] = std::move(reflected);
        values[n] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[n - 1]) {
      simplex[n] = std::move(reflected);
      values[n] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < values[n];
    Point contracted = outside ? affine(centroid, reflected, 0.5)
                               : affine(centroid, worst, 0.5);
    const double f_contracted = objective(contracted);
    if (outside ? f_contracted <= f_reflected : f_contracted < values[n]) {
      simplex[n] = std::move(contracted);
      values[n] = f_contracted;
      continue;
    }

    for (std::size_t v = 1; v <= n; ++v) {
      simplex[v] = affine(simplex[0], simplex[v], 0.5);
      values[v] = objective(simplex[v]);
    }
  }

  result.x = simplex[0];
  result.f = values[0];
  result.iterations = iter;
  return result;
}

OptResult nelder_mead(const Objective& objective, std::vector<double> x0,
                      double tol, std::size_t max_iter) {
  NelderMeadOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return nelder_mead(objective, std::move(x0), options);
}

EberhardConfig settings_config(std::span<const double> x, double eta) {
  if (x.size() != kSettingsDimension) {
    throw Error(ErrorKind::kPrecondition, "settings vector must have 5 entries");
  }
  EberhardConfig cfg;
  cfg.alpha1 = x[0];
  cfg.alpha2 = x[1];
  cfg.beta1 = x[2];
  cfg.beta2 = x[3];
  cfg.r = std::clamp(x[4], kMinEntanglement, 1.0);
  cfg.eta = eta;
  return cfg;
}

OptResult optimize_settings(double eta, std::size_t multistart,
                            MasterSeed seed) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::kDomain, "eta must lie in (0, 1]");
  }
  if (multistart < 1) {
    throw Error(ErrorKind::kPrecondition, "multistart must be >= 1");
  }
  const Objective objective = [eta](std::span<const double> x) {
    return expected_j_per_pair(settings_config(x, eta));
  };

  std::vector<OptResult> restarts(multistart);
  parallel_for(multistart, [&](std::size_t k) {
    RandomStream stream = make_stream(seed, k);
    std::vector<double> x0(kSettingsDimension);
    for (std::size_t i = 0; i < 4; ++i) {
      x0[i] = std::numbers::pi * stream.next_uniform();
    }
    x0[4] = kMinEntanglement + (1.0 - kMinEntanglement) * stream.next_uniform();

    NelderMeadOptions options;
    options.tol = 1e-15;
    options.max_iter = 20000;
    options.initial_step = 0.3;
    OptResult best = nelder_mead(objective, x0, options);
    std::size_t iterations = best.iterations;
    // Re-seeding the simplex around the incumbent guards against a collapsed
    // simplex stalling short of the minimum.
    for (double step : {0.05, 0.005, 0.0005}) {
      options.initial_step = step;
      OptResult polished = nelder_mead(objective, best.x, options);
      iterations += polished.iterations;
      if (polished.f <= best.f) best = std::move(polished);
    }
    best.iterations = iterations;
    restarts[k] = std::move(best);
  });

  std::size_t winner = 0;
  for (std::size_t k = 1; k < restarts.size(); ++k) {
    if (restarts[k].f < restarts[winner].f) winner = k;
  }
  OptResult result = std::move(restarts[winner]);
  for (std::size_t i = 0; i < 4; ++i) result.x[i] = reduce_angle(result.x[i]);
  result.x[4] = std::clamp(result.x[4], kMinEntanglement, 1.0);
  result.f = objective(result.x);
  return result;
}

}  // namespace shl
