#include "shl/breakdown.hpp"

#include <cmath>
#include <string>

#include "shl/error.hpp"
#include "shl/parallel.hpp"

namespace shl {

void BreakdownConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kInvalidConfig, msg);
  };
  for (const double v : f) {
    if (!std::isfinite(v)) fail("f must be finite");
  }
  if (contexts.empty()) fail("at least one context is required");
  for (const auto& ctx : contexts) {
    double total = 0.0;
    for (const double p : ctx.probs) {
      if (!(p >= 0.0)) fail("context " + ctx.label + " has a negative probability");
      total += p;
    }
    if (std::fabs(total - 1.0) >= 1e-12) {
      fail("context " + ctx.label + " probabilities do not sum to 1");
    }
  }
  if (runs == 0) fail("runs must be positive");
  if (items_per_run < 2) fail("items_per_run must be at least 2");
  if (schedule.size() != runs) {
    fail("schedule has " + std::to_string(schedule.size()) +
         " entries for " + std::to_string(runs) + " runs");
  }
  for (const auto& label : schedule) (void)context(label);
}

const ContextSpec& BreakdownConfig::context(const std::string& label) const {
  for (const auto& ctx : contexts) {
    if (ctx.label == label) return ctx;
  }
  throw Error(ErrorKind::kInvalidConfig, "unknown context label '" + label + "'");
}

std::vector<std::string> default_schedule(std::size_t runs) {
  std::vector<std::string> schedule(runs);
  for (std::size_t k = 0; k < runs; ++k) {
    schedule[k] = (k + 1) % 2 == 1 ? "H" : "L";
  }
  if (runs >= 50) std::swap(schedule[48], schedule[49]);
  return schedule;
}

BreakdownConfig default_config() {
  BreakdownConfig cfg;
  cfg.f = {0.86, 0.93, 1.00, 1.07, 1.14, 1.21};
  cfg.contexts = {
      {"H", {0.0, 0.0, 0.01, 0.98, 0.01, 0.0}},
      {"L", {0.01, 0.98, 0.01, 0.0, 0.0, 0.0}},
  };
  cfg.runs = 100;
  cfg.items_per_run = 100000;
  cfg.schedule = default_schedule(cfg.runs);
  return cfg;
}

BreakdownResult run_experiment(const BreakdownConfig& cfg, MasterSeed seed) {
  cfg.validate();

  OutcomeWeights one_minus_f{};
  for (std::size_t c = 0; c < kDeviceOutcomes; ++c) one_minus_f[c] = 1.0 - cfg.f[c];

  BreakdownResult result;
  result.per_run.resize(cfg.runs);
  result.runset.m = static_cast<std::int32_t>(kDeviceOutcomes);
  result.runset.runs.resize(cfg.runs);
  std::vector<std::array<std::uint64_t, kDeviceOutcomes>> counts(cfg.runs);

  parallel_for(cfg.runs, [&](std::size_t k) {
    const auto run_id = static_cast<std::int64_t>(k + 1);
    const ContextSpec& ctx = cfg.context(cfg.schedule[k]);
    const CategoricalSampler sampler(ctx.probs);
    RandomStream stream = make_stream(seed, static_cast<std::uint64_t>(run_id));

    CategoricalOutcomes outcomes(cfg.items_per_run);
    auto& tally = counts[k];
    tally.fill(0);
    for (auto& outcome : outcomes) {
      const std::size_t c = sampler(stream);
      ++tally[c];
      outcome = static_cast<std::int32_t>(c + 1);
    }

    RunSignificance& rs = result.per_run[k];
    rs.run_id = run_id;
    rs.context = ctx.label;
    rs.summary = summarize_grouped(one_minus_f, tally);
    rs.one_minus_b = rs.summary.mean;
    rs.k_sigma = rs.summary.k_sigma;
    result.runset.runs[k] = RunSample{run_id, std::move(outcomes)};
  });

  std::array<std::uint64_t, kDeviceOutcomes> pooled{};
  for (const auto& tally : counts) {
    for (std::size_t c = 0; c < kDeviceOutcomes; ++c) pooled[c] += tally[c];
  }
  result.pooled = summarize_grouped(one_minus_f, pooled);
  return result;
}

double b_statistic(std::span<const double, kDeviceOutcomes> f,
                   std::span<const std::int32_t> outcomes) {
  if (outcomes.empty()) {
    throw Error(ErrorKind::kInsufficientSample, "B needs a non-empty run");
  }
  std::array<std::uint64_t, kDeviceOutcomes> tally{};
  for (const auto x : outcomes) {
    if (x < 1 || x > static_cast<std::int32_t>(kDeviceOutcomes)) {
      throw Error(ErrorKind::kPrecondition,
                  "outcome " + std::to_string(x) + " outside 1..6");
    }
    ++tally[static_cast<std::size_t>(x - 1)];
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < kDeviceOutcomes; ++c) {
    sum += f[c] * static_cast<double>(tally[c]);
  }
  return sum / static_cast<double>(outcomes.size());
}

}  // namespace shl
