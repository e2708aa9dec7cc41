#pragma once

// Six-outcome device whose runs come from different internal contexts.
//
// B is the mean of a weight function f over a run's outcomes and the null
// hypothesis under test is 1 - B >= 0. Context H centres on f = 1.07 and
// context L on f = 0.93 with the same small spread, so any single run sits
// thousands of SEM away from 1 - B = 0 while a balanced pool of H and L runs
// is compatible with it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shl/homogeneity.hpp"
#include "shl/rng.hpp"
#include "shl/stats.hpp"

namespace shl {

inline constexpr std::size_t kDeviceOutcomes = 6;

using OutcomeWeights = std::array<double, kDeviceOutcomes>;

struct ContextSpec {
  std::string label;
  OutcomeWeights probs{};
};

struct BreakdownConfig {
  OutcomeWeights f{};
  std::vector<ContextSpec> contexts;
  /// One context label per run; schedule[k] drives run k + 1.
  std::vector<std::string> schedule;
  std::size_t runs = 0;
  std::size_t items_per_run = 0;

  /// Throws Error(kInvalidConfig) on any broken invariant.
  void validate() const;
  const ContextSpec& context(const std::string& label) const;
};

/// H on odd runs and L on even runs (1-based), with runs 49 and 50 swapped
/// when both exist, so runs 25, 50 and 75 are all H and the split stays even.
std::vector<std::string> default_schedule(std::size_t runs);

/// f = (0.86, 0.93, 1.00, 1.07, 1.14, 1.21), contexts H and L, 100 runs of
/// 100000 items, default_schedule(100).
BreakdownConfig default_config();

struct RunSignificance {
  std::int64_t run_id = 0;
  std::string context;
  /// Summary of the per-item values 1 - f(x).
  SignificanceSummary summary;
  double one_minus_b = 0.0;
  double k_sigma = 0.0;
};

struct BreakdownResult {
  std::vector<RunSignificance> per_run;
  SignificanceSummary pooled;
  RunSet runset;
};

/// Run r (1-based) draws from its scheduled context on stream r.
BreakdownResult run_experiment(const BreakdownConfig& cfg, MasterSeed seed);

/// Mean of f over a run of outcomes in 1..6.
double b_statistic(std::span<const double, kDeviceOutcomes> f,
                   std::span<const std::int32_t> outcomes);

}  // namespace shl
