#include "commands.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "shl/breakdown.hpp"
#include "shl/distributions.hpp"
#include "shl/eberhard.hpp"
#include "shl/error.hpp"
#include "shl/io/csv.hpp"
#include "shl/io/plot.hpp"
#include "shl/io/report.hpp"
#include "shl/optimizer.hpp"
#include "shl/parallel.hpp"

namespace shl::cli {
namespace {

using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr const char* kDefaultAngles = "33.75,78.75,33.75,78.75";

/// Raised for flag combinations CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format(const char* fmt, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, fmt, v);
  return buffer;
}

std::string g17(double v) { return format("%.17g", v); }

// ---------------------------------------------------------------- configs

BreakdownConfig breakdown_config_from_json(const json& j,
                                           bool& schedule_given) {
  BreakdownConfig cfg = default_config();
  if (j.contains("f")) {
    const auto f = j.at("f").get<std::vector<double>>();
    if (f.size() != kDeviceOutcomes) {
      throw Error(ErrorKind::kInvalidConfig, "f must have 6 entries");
    }
    std::copy(f.begin(), f.end(), cfg.f.begin());
  }
  if (j.contains("contexts")) {
    cfg.contexts.clear();
    for (const auto& c : j.at("contexts")) {
      const auto probs = c.at("probs").get<std::vector<double>>();
      if (probs.size() != kDeviceOutcomes) {
        throw Error(ErrorKind::kInvalidConfig, "context probs must have 6 entries");
      }
      ContextSpec spec;
      spec.label = c.at("label").get<std::string>();
      std::copy(probs.begin(), probs.end(), spec.probs.begin());
      cfg.contexts.push_back(std::move(spec));
    }
  }
  if (j.contains("items_per_run")) {
    cfg.items_per_run = j.at("items_per_run").get<std::size_t>();
  }
  if (j.contains("runs")) cfg.runs = j.at("runs").get<std::size_t>();
  schedule_given = j.contains("schedule");
  if (schedule_given) {
    const auto& s = j.at("schedule");
    if (s.is_string()) {
      // One label for every run; expanded by resolve_schedule.
      cfg.schedule = {"*" + s.get<std::string>()};
    } else {
      cfg.schedule = s.get<std::vector<std::string>>();
      if (!j.contains("runs")) cfg.runs = cfg.schedule.size();
    }
  }
  return cfg;
}

// Resolves the run schedule once runs is final. A single-label schedule is
// stored as "*<label>" by the loader and expands here.
void resolve_schedule(BreakdownConfig& cfg, bool schedule_given) {
  if (cfg.schedule.size() == 1 && !cfg.schedule.front().empty() &&
      cfg.schedule.front().front() == '*') {
    cfg.schedule.assign(cfg.runs, cfg.schedule.front().substr(1));
    return;
  }
  if (!schedule_given && cfg.schedule.size() != cfg.runs) {
    cfg.schedule = default_schedule(cfg.runs);
  }
}

std::array<double, 4> parse_angles_deg(const std::string& text) {
  std::array<double, 4> out{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 4) throw UsageError("--angles takes exactly 4 values");
    std::size_t used = 0;
    try {
      out[i] = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(out[i])) {
      throw UsageError("bad angle '" + item + "' in --angles");
    }
    ++i;
  }
  if (i != 4) throw UsageError("--angles takes exactly 4 values");
  return out;
}

json angles_json(const EberhardConfig& cfg, double scale) {
  return json{{"alpha1", cfg.alpha1 * scale},
              {"alpha2", cfg.alpha2 * scale},
              {"beta1", cfg.beta1 * scale},
              {"beta2", cfg.beta2 * scale}};
}

// ---------------------------------------------------------------- text out

void print_breakdown_table(std::ostream& out, const BreakdownResult& result) {
  char line[160];
  std::snprintf(line, sizeof line, "%6s  %-8s  %14s  %12s  %12s\n", "run",
                "context", "1-B", "SEM", "k_sigma");
  out << line;
  for (const auto& r : result.per_run) {
    std::snprintf(line, sizeof line, "%6lld  %-8s  %14.6e  %12.4e  %12.2f\n",
                  static_cast<long long>(r.run_id), r.context.c_str(),
                  r.one_minus_b, r.summary.sem, r.k_sigma);
    out << line;
  }
  std::snprintf(line, sizeof line, "%6s  %-8s  %14.6e  %12.4e  %12.2f\n",
                "pooled", "-", result.pooled.mean, result.pooled.sem,
                result.pooled.k_sigma);
  out << line;
}

void print_homogeneity(std::ostream& out, const HomogeneityReport& h) {
  for (const auto& r : h.results) {
    out << "  " << r.name << ": statistic " << format("%.6g", r.statistic)
        << ", p " << format("%.4g", r.p_value);
    if (r.dof) out << ", dof " << *r.dof;
    out << '\n';
  }
  for (const auto& f : h.failures) {
    out << "  " << f.name << ": ERROR " << f.message << '\n';
  }
  out << "corrected alpha " << format("%.4g", h.corrected_alpha)
      << ", verdict " << to_string(h.verdict) << '\n';
}

void print_estimate(std::ostream& out, const JEstimate& est) {
  out << "bins        " << est.summary.n << '\n'
      << "mean J      " << format("%.6g", est.summary.mean) << '\n'
      << "SEM         " << format("%.6g", est.summary.sem) << '\n'
      << "k_sigma     " << format("%.4f", est.summary.k_sigma)
      << (est.summary.degenerate ? " (degenerate: s = 0)" : "") << '\n'
      << "Chebyshev   " << format("%.9f", est.chebyshev_conf) << '\n'
      << "Cantelli    " << format("%.9f", est.cantelli_conf) << '\n';
}

// ---------------------------------------------------------------- audits

// Per-setting chi-square across bins plus the independence/drift tests on
// the per-bin J sequence. Tests whose minimum length exceeds the number of
// bins are listed in `skipped` instead of failing.
HomogeneityReport audit_counts(std::span<const SettingCounts> counts,
                               const JEstimate& est, double alpha,
                               std::size_t n_perm, MasterSeed seed,
                               std::vector<std::string>& skipped) {
  HomogeneityReport report;
  auto attempt = [&](const std::string& name, auto&& test) {
    try {
      TestResult r = test();
      r.name = name;
      report.results.push_back(std::move(r));
    } catch (const Error& e) {
      report.failures.push_back({name, std::string(to_string(e.kind())), e.what()});
    }
  };

  const std::size_t bins = est.per_bin_j.size();
  for (const Setting s : kAllSettings) {
    ContingencyTable table(bins, 9);
    for (const auto& c : counts) {
      if (c.setting != s) continue;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          table.at(c.bin - 1, static_cast<std::size_t>(3 * a + b)) +=
              static_cast<std::uint64_t>(
                  c.joint(static_cast<Channel>(a), static_cast<Channel>(b)));
        }
      }
    }
    attempt("chi2_homogeneity:setting=(" + std::to_string(s.a) + "," +
                std::to_string(s.b) + ")",
            [&] { return chi2_homogeneity(table); });
  }

  const std::span<const double> j = est.per_bin_j;
  const std::size_t half = j.size() / 2;
  attempt("ks_two_sample:first_vs_second_half",
          [&] { return ks_two_sample(j.first(half), j.subspan(half)); });
  if (j.size() >= kRunsTestMinLength) {
    attempt("runs_test", [&] { return runs_test(j); });
  } else {
    skipped.push_back("runs_test");
  }
  if (j.size() >= kLag1MinLength) {
    attempt("lag1_autocorr", [&] { return lag1_autocorr_test(j); });
  } else {
    skipped.push_back("lag1_autocorr");
  }
  if (j.size() >= kCusumMinLength) {
    attempt("cusum_changepoint", [&] {
      return cusum_changepoint(j, n_perm, make_stream(seed, 0));
    });
  } else {
    skipped.push_back("cusum_changepoint");
  }
  finalize(report, alpha);
  return report;
}

std::string significance_text(const JEstimate& est, double alpha,
                              const std::optional<HomogeneityReport>& audit) {
  const auto& s = est.summary;
  const bool rejected = s.mean < 0.0 && est.cantelli_conf >= 1.0 - alpha;
  std::string text = rejected ? "H0 rejected (J >= 0)" : "H0 not rejected (J >= 0)";
  text += ": <J> = " + format("%.6g", s.mean) + ", SEM = " +
          format("%.6g", s.sem) + ", k_sigma = " + format("%.3f", s.k_sigma);
  if (s.degenerate) text += " (degenerate: s = 0)";
  text += ", Chebyshev confidence " + format("%.6f", est.chebyshev_conf) +
          ", Cantelli confidence " + format("%.6f", est.cantelli_conf);
  if (!audit) {
    text += "; audit: not performed (homogeneity unverified)";
  } else {
    text += "; audit: " + std::string(to_string(audit->verdict));
    if (audit->verdict == Verdict::kHomogeneous) {
      text += rejected ? " (rejection trustworthy)" : "";
    } else if (audit->verdict == Verdict::kInhomogeneous) {
      text += " (sample homogeneity loophole open; significance not trustworthy)";
    } else {
      text += " (some tests could not run; homogeneity unverified)";
    }
  }
  return text;
}

// ---------------------------------------------------------------- commands

unsigned threads_from_env() {
  const char* value = std::getenv("SHL_THREADS");
  if (value == nullptr || *value == '\0') return 1;
  unsigned threads = 0;
  const std::string_view text(value);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), threads);
  if (ec != std::errc{} || ptr != text.data() + text.size() || threads < 1 ||
      threads > 1024) {
    throw UsageError("SHL_THREADS must be an integer in 1..1024, got '" +
                     std::string(text) + "'");
  }
  return threads;
}

struct GlobalOptions {
  unsigned threads = 1;
};

struct DeviceOptions {
  std::size_t runs = 100;
  std::size_t items = 100000;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

int simulate_device(const DeviceOptions& o, const CLI::App& cmd,
                    std::ostream& out) {
  BreakdownConfig cfg = default_config();
  bool schedule_given = false;
  if (!o.config.empty()) {
    json j;
    try {
      j = json::parse(io::read_file(o.config));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInvalidConfig,
                  "cannot parse '" + o.config + "': " + e.what());
    }
    try {
      cfg = breakdown_config_from_json(j, schedule_given);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInvalidConfig, e.what());
    }
  }
  if (cmd.count("--runs") > 0 || o.config.empty()) cfg.runs = o.runs;
  if (cmd.count("--items") > 0 || o.config.empty()) cfg.items_per_run = o.items;
  resolve_schedule(cfg, schedule_given);
  cfg.validate();

  const BreakdownResult result = run_experiment(cfg, MasterSeed{o.seed});
  io::write_file(o.out, io::format_outcomes(result.runset));
  print_breakdown_table(out, result);
  return kExitOk;
}

struct AuditOptionsCli {
  std::string in;
  double alpha = 0.01;
  std::size_t perm = AuditOptions{}.n_perm;
  std::uint64_t seed = 0;
  std::string out;
};

int audit_command(const AuditOptionsCli& o, std::ostream& out) {
  const std::string text = io::read_file(o.in);
  io::ReportDocument doc;
  doc.command = "audit";
  RunSet rs;
  switch (io::sniff(text)) {
    case io::TableKind::kOutcomes:
      rs = io::parse_outcomes(text);
      doc.config["input_kind"] = "outcomes";
      break;
    case io::TableKind::kValues: {
      rs = io::parse_values(text);
      doc.config["input_kind"] = "values";
      const auto all = concatenate(rs);
      if (all.size() >= 2) doc.significance = summarize(all);
      break;
    }
    default:
      throw io::ParseError(1, "unrecognised header; expected '" +
                                  std::string(io::kOutcomesHeader) + "' or '" +
                                  std::string(io::kValuesHeader) + "'");
  }
  doc.config["in"] = o.in;
  doc.config["alpha"] = o.alpha;
  doc.config["perm"] = o.perm;
  doc.config["seed"] = o.seed;
  doc.config["runs"] = rs.runs.size();
  doc.config["items"] = rs.total_size();

  AuditOptions options;
  options.n_perm = o.perm;
  const HomogeneityReport report =
      audit(rs, o.alpha, make_stream(MasterSeed{o.seed}, 0), options);
  doc.verdict_text = "audit: " + std::string(to_string(report.verdict));
  doc.homogeneity = report;
  io::write_file(o.out, io::emit_report(doc));

  out << "audited " << rs.runs.size() << " runs, " << rs.total_size()
      << " items\n";
  print_homogeneity(out, report);
  return exit_code_for(report.verdict);
}

struct EberhardOptionsCli {
  double eta = 1.0;
  double r = 1.0;
  std::string angles = kDefaultAngles;
  std::string settings;
  std::uint64_t pairs = 3'000'000;
  std::uint32_t bins = 30;
  std::uint64_t seed = 0;
  std::string out;
};

int simulate_eberhard(const EberhardOptionsCli& o, const CLI::App& cmd,
                      std::ostream& out) {
  EberhardConfig cfg;
  cfg.eta = o.eta;
  cfg.r = o.r;
  const auto deg = parse_angles_deg(o.angles);
  cfg.alpha1 = deg[0] / kDegPerRad;
  cfg.alpha2 = deg[1] / kDegPerRad;
  cfg.beta1 = deg[2] / kDegPerRad;
  cfg.beta2 = deg[3] / kDegPerRad;
  if (!o.settings.empty()) {
    try {
      const json s = json::parse(io::read_file(o.settings));
      const auto& rad = s.at("angles_rad");
      cfg.alpha1 = rad.at("alpha1").get<double>();
      cfg.alpha2 = rad.at("alpha2").get<double>();
      cfg.beta1 = rad.at("beta1").get<double>();
      cfg.beta2 = rad.at("beta2").get<double>();
      cfg.r = s.at("r").get<double>();
      if (cmd.count("--eta") == 0) cfg.eta = s.at("eta").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInvalidConfig,
                  "bad settings file '" + o.settings + "': " + e.what());
    }
  }
  cfg.pairs_per_setting = o.pairs;
  cfg.bins = o.bins;
  cfg.validate();

  const auto counts = simulate(cfg, MasterSeed{o.seed});
  io::write_file(o.out, io::format_counts(counts));
  const JEstimate est = estimate(counts, cfg.bins);
  const double trials = static_cast<double>(cfg.pairs_per_setting / cfg.bins);
  out << "expected J per pair  " << format("%.9f", expected_j_per_pair(cfg))
      << "\nexpected J per bin   "
      << format("%.6g", expected_j_per_pair(cfg) * trials) << '\n';
  print_estimate(out, est);
  return kExitOk;
}

struct SignificanceOptionsCli {
  std::string in;
  std::string out;
  bool audit = false;
  double alpha = 0.01;
  std::size_t perm = AuditOptions{}.n_perm;
  std::uint64_t seed = 0;
};

int significance_command(const SignificanceOptionsCli& o, std::ostream& out) {
  const auto counts = io::parse_counts(io::read_file(o.in));
  std::uint32_t bins = 0;
  for (const auto& c : counts) bins = std::max(bins, c.bin);
  if (bins < 2) {
    throw Error(ErrorKind::kInsufficientSample,
                "significance needs counts for at least 2 bins");
  }
  const JEstimate est =
      estimate(counts, bins, TrialPolicy::kRescaleToMinimum);

  io::ReportDocument doc;
  doc.command = "significance";
  doc.config = {{"in", o.in}, {"bins", bins}, {"alpha", o.alpha},
                {"audit", o.audit}};
  if (est.rescaled) {
    doc.config["warning"] =
        "unequal trials across settings; J computed from per-trial rates "
        "rescaled to the minimum trials";
  }
  doc.significance = est.summary;
  doc.per_bin_j = est.per_bin_j;
  doc.chebyshev_conf = est.chebyshev_conf;
  doc.cantelli_conf = est.cantelli_conf;

  std::optional<HomogeneityReport> report;
  if (o.audit) {
    std::vector<std::string> skipped;
    report = audit_counts(counts, est, o.alpha, o.perm, MasterSeed{o.seed},
                          skipped);
    doc.config["perm"] = o.perm;
    doc.config["seed"] = o.seed;
    doc.config["skipped_tests"] = skipped;
    doc.homogeneity = report;
  }
  doc.verdict_text = significance_text(est, o.alpha, report);
  io::write_file(o.out, io::emit_report(doc));

  print_estimate(out, est);
  if (report) print_homogeneity(out, *report);
  out << doc.verdict_text << '\n';
  return report ? exit_code_for(report->verdict) : kExitOk;
}

struct OptimizeOptionsCli {
  double eta = 1.0;
  std::size_t multistart = 20;
  std::uint64_t seed = 0;
  std::string out;
};

int optimize_command(const OptimizeOptionsCli& o, std::ostream& out) {
  if (!(o.eta > 0.0 && o.eta <= 1.0)) {
    throw UsageError("--eta must lie in (0, 1]");
  }
  const OptResult best = optimize_settings(o.eta, o.multistart, MasterSeed{o.seed});
  const EberhardConfig cfg = settings_config(best.x, o.eta);
  const json doc = {{"eta", o.eta},
                    {"j_pp", best.f},
                    {"r", cfg.r},
                    {"angles_deg", angles_json(cfg, kDegPerRad)},
                    {"angles_rad", angles_json(cfg, 1.0)},
                    {"iterations", best.iterations},
                    {"converged", best.converged},
                    {"multistart", o.multistart},
                    {"seed", o.seed}};
  io::write_file(o.out, doc.dump(2) + "\n");
  out << "eta " << g17(o.eta) << ": J_pp = " << format("%.9f", best.f)
      << " at r = " << format("%.6f", cfg.r) << ", angles (deg) "
      << format("%.4f", cfg.alpha1 * kDegPerRad) << ", "
      << format("%.4f", cfg.alpha2 * kDegPerRad) << ", "
      << format("%.4f", cfg.beta1 * kDegPerRad) << ", "
      << format("%.4f", cfg.beta2 * kDegPerRad) << '\n';
  return kExitOk;
}

struct ReportOptionsCli {
  std::string in;
  std::string svg;
  std::string tsv;
};

int report_command(const ReportOptionsCli& o, std::ostream& out) {
  const io::ReportDocument doc = io::parse_report(io::read_file(o.in));
  if (doc.per_bin_j.empty() || !doc.significance) {
    throw UsageError("report '" + o.in +
                     "' has no per-bin J values; produce it with "
                     "'shl significance'");
  }
  if (o.svg.empty() && o.tsv.empty()) {
    throw UsageError("nothing to do: pass --svg and/or --tsv");
  }
  if (!o.svg.empty()) {
    io::write_file(o.svg, io::render_bins_svg(doc.per_bin_j, *doc.significance));
  }
  if (!o.tsv.empty()) {
    io::write_file(o.tsv, io::render_bins_tsv(doc.per_bin_j));
  }
  out << "rendered " << doc.per_bin_j.size() << " bins\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::kHomogeneous: return kExitHomogeneous;
    case Verdict::kInhomogeneous: return kExitInhomogeneous;
    case Verdict::kInconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Sample homogeneity toolkit: breakdown and Eberhard simulators, "
               "homogeneity audits, significance reports"};
  app.name(args.empty() ? "shl" : args.front());
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  auto* threads_opt =
      app.add_option("--threads", global.threads,
                     "Worker threads for simulations and permutation tests "
                     "(default: $SHL_THREADS, else 1)")
          ->check(CLI::Range(1u, 1024u));
  app.option_defaults()->always_capture_default();

  DeviceOptions device;
  auto* device_cmd = app.add_subcommand(
      "simulate-device", "Simulate the six-outcome device and write outcomes CSV");
  device_cmd->add_option("--runs", device.runs, "Number of runs")
      ->check(CLI::PositiveNumber);
  device_cmd->add_option("--items", device.items, "Items per run")
      ->check(CLI::PositiveNumber);
  device_cmd->add_option("--seed", device.seed, "Master seed");
  device_cmd->add_option("--out", device.out, "Outcomes CSV path")->required();
  device_cmd->add_option("--config", device.config, "Breakdown config JSON");

  AuditOptionsCli audit_opts;
  auto* audit_cmd = app.add_subcommand(
      "audit", "Run the homogeneity battery on an outcomes or values CSV");
  audit_cmd->add_option("--in", audit_opts.in, "Input CSV")->required();
  audit_cmd->add_option("--alpha", audit_opts.alpha, "Family-wise level")
      ->check(CLI::Range(0.0, 1.0));
  audit_cmd->add_option("--perm", audit_opts.perm, "CUSUM permutations");
  audit_cmd->add_option("--seed", audit_opts.seed, "Master seed");
  audit_cmd->add_option("--out", audit_opts.out, "Report JSON path")->required();

  EberhardOptionsCli eb;
  auto* eb_cmd = app.add_subcommand(
      "simulate-eberhard", "Simulate binned counts for the four settings");
  eb_cmd->add_option("--eta", eb.eta, "Detection efficiency");
  eb_cmd->add_option("--r", eb.r, "Entanglement parameter in (0, 1]");
  eb_cmd->add_option("--angles", eb.angles, "a1,a2,b1,b2 in degrees")
      ->capture_default_str();
  eb_cmd->add_option("--settings", eb.settings,
                     "Settings JSON from 'optimize' (overrides --r/--angles)");
  eb_cmd->add_option("--pairs", eb.pairs, "Pairs per setting");
  eb_cmd->add_option("--bins", eb.bins, "Bins per setting");
  eb_cmd->add_option("--seed", eb.seed, "Master seed");
  eb_cmd->add_option("--out", eb.out, "Counts CSV path")->required();

  SignificanceOptionsCli sig;
  auto* sig_cmd = app.add_subcommand(
      "significance", "Binned J significance from a counts CSV");
  sig_cmd->add_option("--in", sig.in, "Counts CSV")->required();
  sig_cmd->add_option("--out", sig.out, "Report JSON path")->required();
  sig_cmd->add_flag("--audit", sig.audit, "Also audit homogeneity");
  sig_cmd->add_option("--alpha", sig.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0));
  sig_cmd->add_option("--perm", sig.perm, "CUSUM permutations");
  sig_cmd->add_option("--seed", sig.seed, "Master seed");

  OptimizeOptionsCli opt;
  auto* opt_cmd = app.add_subcommand(
      "optimize", "Find angles and r minimizing expected J per pair");
  opt_cmd->add_option("--eta", opt.eta, "Detection efficiency in (0, 1]")
      ->required();
  opt_cmd->add_option("--multistart", opt.multistart, "Random restarts")
      ->check(CLI::PositiveNumber);
  opt_cmd->add_option("--seed", opt.seed, "Master seed");
  opt_cmd->add_option("--out", opt.out, "Settings JSON path")->required();

  ReportOptionsCli rep;
  auto* rep_cmd = app.add_subcommand(
      "report", "Render per-bin J from a significance report as SVG/TSV");
  rep_cmd->add_option("--in", rep.in, "Report JSON")->required();
  rep_cmd->add_option("--svg", rep.svg, "SVG output path");
  rep_cmd->add_option("--tsv", rep.tsv, "TSV output path");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (threads_opt->count() == 0) global.threads = threads_from_env();
    set_worker_count(global.threads);
    if (*device_cmd) return simulate_device(device, *device_cmd, out);
    if (*audit_cmd) return audit_command(audit_opts, out);
    if (*eb_cmd) return simulate_eberhard(eb, *eb_cmd, out);
    if (*sig_cmd) return significance_command(sig, out);
    if (*opt_cmd) return optimize_command(opt, out);
    if (*rep_cmd) return report_command(rep, out);
  } catch (const io::ParseError& e) {
    err << "error: malformed input: " << e.what() << '\n';
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace shl::cli
