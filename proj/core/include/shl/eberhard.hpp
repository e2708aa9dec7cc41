#pragma once

// Eberhard-type Bell test with inefficient detectors.
//
// Source state (|HV> + r|VH>) / sqrt(1 + r^2). Each side passes a two-channel
// polarizer at its setting angle: 'o' projects on cos(a)|H> + sin(a)|V>, 'e' on
// the orthogonal state, and each photon is then detected independently with
// probability eta ('u' = undetected).
//
// J = nA_o(a1) + nB_o(b1) + n_oo(a2,b2) - n_oo(a1,b1) - n_oo(a1,b2) - n_oo(a2,b1)
// is non-negative for every local deterministic strategy, so local realism
// predicts E[J] >= 0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shl/rng.hpp"
#include "shl/stats.hpp"

namespace shl {

enum class Channel : std::uint8_t { kO = 0, kE = 1, kU = 2 };

struct Setting {
  int a = 1;  ///< Alice angle index, 1 or 2.
  int b = 1;  ///< Bob angle index, 1 or 2.

  /// 0..3 in the order (1,1), (1,2), (2,1), (2,2).
  int index() const noexcept { return 2 * (a - 1) + (b - 1); }
  friend bool operator==(Setting, Setting) = default;
};

inline constexpr std::array<Setting, 4> kAllSettings = {
    Setting{1, 1}, Setting{1, 2}, Setting{2, 1}, Setting{2, 2}};

struct EberhardConfig {
  double r = 1.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double eta = 1.0;
  std::uint64_t pairs_per_setting = 0;
  std::uint32_t bins = 30;

  double alpha(int i) const noexcept { return i == 1 ? alpha1 : alpha2; }
  double beta(int j) const noexcept { return j == 1 ? beta1 : beta2; }

  /// Model parameters only (r, eta, angles).
  void validate_model() const;
  /// Model parameters plus pairs_per_setting % bins == 0.
  void validate() const;
};

/// 3x3 joint law over Alice x Bob channels, indexed by Channel.
struct SettingProbabilities {
  std::array<std::array<double, 3>, 3> p{};

  double at(Channel a, Channel b) const noexcept {
    return p[static_cast<int>(a)][static_cast<int>(b)];
  }
  double total() const noexcept;
};

SettingProbabilities quantum_probabilities(const EberhardConfig& cfg,
                                           Setting setting);

/// Probability of an 'o' click on Alice's side at angle alpha_i.
double alice_single_o(const EberhardConfig& cfg, int i);
/// Probability of an 'o' click on Bob's side at angle beta_j.
double bob_single_o(const EberhardConfig& cfg, int j);

/// J contribution of one pair under a deterministic local strategy.
/// alice[i - 1] is Alice's response at alpha_i, bob[j - 1] Bob's at beta_j.
int lhv_expected_j(std::array<Channel, 2> alice, std::array<Channel, 2> bob);

/// Expected J per emitted pair under the quantum model.
double expected_j_per_pair(const EberhardConfig& cfg);

struct SettingCounts {
  Setting setting;
  std::uint32_t bin = 1;
  std::int64_t n_oo = 0, n_oe = 0, n_eo = 0, n_ee = 0;
  std::int64_t n_ou = 0, n_uo = 0, n_eu = 0, n_ue = 0, n_uu = 0;
  std::int64_t nA_o = 0;
  std::int64_t nB_o = 0;
  std::int64_t trials = 0;

  std::int64_t& joint(Channel a, Channel b) noexcept;
  std::int64_t joint(Channel a, Channel b) const noexcept;
  /// Throws kInconsistentCounts unless the nine cells sum to trials and the
  /// singles equal their marginals.
  void check_closure() const;

  friend bool operator==(const SettingCounts&, const SettingCounts&) = default;
};

/// Draws pairs_per_setting / bins pairs for every (setting, bin); setting s
/// and bin b (1-based) use stream s * 1'000'000 + b. Output ordered by
/// setting index then bin.
std::vector<SettingCounts> simulate(const EberhardConfig& cfg, MasterSeed seed);

/// J for one bin from the four settings' counts (singles from the (1,1) run).
/// Requires equal trials across the four settings.
std::int64_t j_from_counts(std::span<const SettingCounts> bin_counts);

enum class TrialPolicy {
  kStrict,
  /// Unequal trials: J from per-trial rates, rescaled by the minimum trials.
  kRescaleToMinimum,
};

/// j_from_counts generalised to unequal trials under kRescaleToMinimum.
/// Returns J as a real; `rescaled` reports whether trials differed.
double j_from_counts(std::span<const SettingCounts> bin_counts,
                     TrialPolicy policy, bool* rescaled = nullptr);

struct JEstimate {
  std::vector<double> per_bin_j;
  SignificanceSummary summary;
  double chebyshev_conf = 0.0;
  double cantelli_conf = 0.0;
  /// True if any bin needed trial rescaling.
  bool rescaled = false;
};

/// Confidence bounds for a summary's |k_sigma|; 0 for k = 0, 1 for infinite k.
double chebyshev_for(const SignificanceSummary& summary);
double cantelli_for(const SignificanceSummary& summary);

/// Per-bin J for bins 1..bins, then its significance summary.
JEstimate estimate(std::span<const SettingCounts> counts, std::uint32_t bins,
                   TrialPolicy policy = TrialPolicy::kStrict);

}  // namespace shl
