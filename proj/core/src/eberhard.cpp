#include "shl/eberhard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shl/error.hpp"
#include "shl/parallel.hpp"

namespace shl {
namespace {

constexpr std::uint64_t kSettingStreamStride = 1'000'000;

std::string describe(Setting s) {
  return "(" + std::to_string(s.a) + "," + std::to_string(s.b) + ")";
}

// Orders the four settings of one bin; throws on a missing or repeated one.
std::array<const SettingCounts*, 4> by_setting(
    std::span<const SettingCounts> bin_counts) {
  std::array<const SettingCounts*, 4> slots{};
  for (const auto& c : bin_counts) {
    if (c.setting.a < 1 || c.setting.a > 2 || c.setting.b < 1 ||
        c.setting.b > 2) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "invalid setting " + describe(c.setting));
    }
    auto& slot = slots[static_cast<std::size_t>(c.setting.index())];
    if (slot != nullptr) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "setting " + describe(c.setting) + " given twice for bin " +
                      std::to_string(c.bin));
    }
    if (c.bin != bin_counts.front().bin) {
      throw Error(ErrorKind::kInconsistentCounts, "counts span several bins");
    }
    slot = &c;
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (slots[s] == nullptr) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "missing setting " + describe(kAllSettings[s]));
    }
  }
  return slots;
}

}  // namespace

void EberhardConfig::validate_model() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kInvalidConfig, msg);
  };
  if (!(r > 0.0 && r <= 1.0)) fail("r must lie in (0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) fail("eta must lie in [0, 1]");
  for (const double angle : {alpha1, alpha2, beta1, beta2}) {
    if (!std::isfinite(angle)) fail("angles must be finite");
  }
}

void EberhardConfig::validate() const {
  validate_model();
  if (bins == 0) throw Error(ErrorKind::kInvalidConfig, "bins must be positive");
  if (pairs_per_setting == 0 || pairs_per_setting % bins != 0) {
    throw Error(ErrorKind::kInvalidConfig,
                "pairs_per_setting (" + std::to_string(pairs_per_setting) +
                    ") must be a positive multiple of bins (" +
                    std::to_string(bins) + ")");
  }
}

double SettingProbabilities::total() const noexcept {
  double sum = 0.0;
  for (const auto& row : p) {
    for (const double v : row) sum += v;
  }
  return sum;
}

SettingProbabilities quantum_probabilities(const EberhardConfig& cfg,
                                           Setting setting) {
  const double a = cfg.alpha(setting.a);
  const double b = cfg.beta(setting.b);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double r = cfg.r;
  const double norm = 1.0 + r * r;

  // Projections of the state onto the four polarizer output pairs.
  const double amp_oo = ca * sb + r * sa * cb;
  const double amp_oe = ca * cb - r * sa * sb;
  const double amp_eo = -sa * sb + r * ca * cb;
  const double amp_ee = -sa * cb - r * ca * sb;
  const double q_oo = amp_oo * amp_oo / norm;
  const double q_oe = amp_oe * amp_oe / norm;
  const double q_eo = amp_eo * amp_eo / norm;
  const double q_ee = amp_ee * amp_ee / norm;

  const double eta = cfg.eta;
  const double both = eta * eta;
  const double one = eta * (1.0 - eta);

  SettingProbabilities out;
  auto& p = out.p;
  constexpr int o = 0, e = 1, u = 2;
  p[o][o] = both * q_oo;
  p[o][e] = both * q_oe;
  p[e][o] = both * q_eo;
  p[e][e] = both * q_ee;
  p[o][u] = one * (q_oo + q_oe);
  p[e][u] = one * (q_eo + q_ee);
  p[u][o] = one * (q_oo + q_eo);
  p[u][e] = one * (q_oe + q_ee);
  p[u][u] = (1.0 - eta) * (1.0 - eta);
  return out;
}

double alice_single_o(const EberhardConfig& cfg, int i) {
  const double a = cfg.alpha(i);
  const double c = std::cos(a), s = std::sin(a);
  return cfg.eta * (c * c + cfg.r * cfg.r * s * s) / (1.0 + cfg.r * cfg.r);
}

double bob_single_o(const EberhardConfig& cfg, int j) {
  const double b = cfg.beta(j);
  const double c = std::cos(b), s = std::sin(b);
  return cfg.eta * (s * s + cfg.r * cfg.r * c * c) / (1.0 + cfg.r * cfg.r);
}

int lhv_expected_j(std::array<Channel, 2> alice, std::array<Channel, 2> bob) {
  const int a1 = alice[0] == Channel::kO;
  const int a2 = alice[1] == Channel::kO;
  const int b1 = bob[0] == Channel::kO;
  const int b2 = bob[1] == Channel::kO;
  return a1 + b1 + (a2 & b2) - (a1 & b1) - (a1 & b2) - (a2 & b1);
}

double expected_j_per_pair(const EberhardConfig& cfg) {
  auto p_oo = [&](int i, int j) {
    return quantum_probabilities(cfg, Setting{i, j}).at(Channel::kO, Channel::kO);
  };
  return alice_single_o(cfg, 1) + bob_single_o(cfg, 1) + p_oo(2, 2) -
         p_oo(1, 1) - p_oo(1, 2) - p_oo(2, 1);
}

std::int64_t& SettingCounts::joint(Channel a, Channel b) noexcept {
  std::int64_t* cells[3][3] = {{&n_oo, &n_oe, &n_ou},
                               {&n_eo, &n_ee, &n_eu},
                               {&n_uo, &n_ue, &n_uu}};
  return *cells[static_cast<int>(a)][static_cast<int>(b)];
}

std::int64_t SettingCounts::joint(Channel a, Channel b) const noexcept {
  return const_cast<SettingCounts*>(this)->joint(a, b);
}

void SettingCounts::check_closure() const {
  const std::int64_t cells[] = {n_oo, n_oe, n_eo, n_ee, n_ou,
                                n_uo, n_eu, n_ue, n_uu};
  std::int64_t total = 0;
  for (const auto c : cells) {
    if (c < 0) {
      throw Error(ErrorKind::kInconsistentCounts, "negative count");
    }
    total += c;
  }
  const std::string where =
      "setting " + describe(setting) + " bin " + std::to_string(bin);
  if (total != trials) {
    throw Error(ErrorKind::kInconsistentCounts,
                where + ": joint counts sum to " + std::to_string(total) +
                    ", trials = " + std::to_string(trials));
  }
  if (nA_o != n_oo + n_oe + n_ou) {
    throw Error(ErrorKind::kInconsistentCounts,
                where + ": nA_o differs from n_oo + n_oe + n_ou");
  }
  if (nB_o != n_oo + n_eo + n_uo) {
    throw Error(ErrorKind::kInconsistentCounts,
                where + ": nB_o differs from n_oo + n_eo + n_uo");
  }
}

std::vector<SettingCounts> simulate(const EberhardConfig& cfg, MasterSeed seed) {
  cfg.validate();
  const std::size_t bins = cfg.bins;
  const auto trials = static_cast<std::int64_t>(cfg.pairs_per_setting / bins);

  std::vector<SettingCounts> out(kAllSettings.size() * bins);
  parallel_for(out.size(), [&](std::size_t task) {
    const Setting setting = kAllSettings[task / bins];
    const auto bin = static_cast<std::uint32_t>(task % bins + 1);
    const SettingProbabilities law = quantum_probabilities(cfg, setting);

    std::array<double, 9> weights{};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) weights[3 * a + b] = law.p[a][b];
    }
    const CategoricalSampler sampler(weights);
    RandomStream stream = make_stream(
        seed, static_cast<std::uint64_t>(setting.index()) * kSettingStreamStride +
                  bin);

    std::array<std::int64_t, 9> tally{};
    for (std::int64_t t = 0; t < trials; ++t) ++tally[sampler(stream)];

    SettingCounts& c = out[task];
    c.setting = setting;
    c.bin = bin;
    c.trials = trials;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        c.joint(static_cast<Channel>(a), static_cast<Channel>(b)) =
            tally[3 * a + b];
      }
    }
    c.nA_o = c.n_oo + c.n_oe + c.n_ou;
    c.nB_o = c.n_oo + c.n_eo + c.n_uo;
  });
  return out;
}

std::int64_t j_from_counts(std::span<const SettingCounts> bin_counts) {
  const auto s = by_setting(bin_counts);
  for (const auto* c : s) {
    if (c->trials != s[0]->trials) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "settings of bin " + std::to_string(c->bin) +
                      " have different trial counts");
    }
  }
  return s[0]->nA_o + s[0]->nB_o + s[3]->n_oo - s[0]->n_oo - s[1]->n_oo -
         s[2]->n_oo;
}

double j_from_counts(std::span<const SettingCounts> bin_counts,
                     TrialPolicy policy, bool* rescaled) {
  const auto s = by_setting(bin_counts);
  bool equal = true;
  std::int64_t min_trials = s[0]->trials;
  for (const auto* c : s) {
    equal = equal && c->trials == s[0]->trials;
    min_trials = std::min(min_trials, c->trials);
  }
  if (rescaled != nullptr) *rescaled = !equal;
  if (equal || policy == TrialPolicy::kStrict) {
    return static_cast<double>(j_from_counts(bin_counts));
  }
  for (const auto* c : s) {
    if (c->trials <= 0) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "cannot rescale a setting with zero trials");
    }
  }
  auto rate = [](std::int64_t n, const SettingCounts* c) {
    return static_cast<double>(n) / static_cast<double>(c->trials);
  };
  const double per_trial = rate(s[0]->nA_o, s[0]) + rate(s[0]->nB_o, s[0]) +
                           rate(s[3]->n_oo, s[3]) - rate(s[0]->n_oo, s[0]) -
                           rate(s[1]->n_oo, s[1]) - rate(s[2]->n_oo, s[2]);
  return per_trial * static_cast<double>(min_trials);
}

double chebyshev_for(const SignificanceSummary& summary) {
  const double k = std::fabs(summary.k_sigma);
  if (k == 0.0 || std::isnan(k)) return 0.0;
  if (std::isinf(k)) return 1.0;
  return chebyshev_confidence(k);
}

double cantelli_for(const SignificanceSummary& summary) {
  const double k = std::fabs(summary.k_sigma);
  if (k == 0.0 || std::isnan(k)) return 0.0;
  if (std::isinf(k)) return 1.0;
  return cantelli_confidence(k);
}

JEstimate estimate(std::span<const SettingCounts> counts, std::uint32_t bins,
                   TrialPolicy policy) {
  if (bins == 0) throw Error(ErrorKind::kPrecondition, "bins must be positive");
  std::vector<std::vector<SettingCounts>> grouped(bins);
  for (const auto& c : counts) {
    if (c.bin < 1 || c.bin > bins) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "bin " + std::to_string(c.bin) + " outside 1.." +
                      std::to_string(bins));
    }
    grouped[c.bin - 1].push_back(c);
  }

  JEstimate est;
  est.per_bin_j.reserve(bins);
  for (std::uint32_t b = 0; b < bins; ++b) {
    if (grouped[b].empty()) {
      throw Error(ErrorKind::kInconsistentCounts,
                  "no counts for bin " + std::to_string(b + 1));
    }
    bool rescaled = false;
    est.per_bin_j.push_back(j_from_counts(grouped[b], policy, &rescaled));
    est.rescaled = est.rescaled || rescaled;
  }
  est.summary = summarize(est.per_bin_j);
  est.chebyshev_conf = chebyshev_for(est.summary);
  est.cantelli_conf = cantelli_for(est.summary);
  return est;
}

}  // namespace shl
