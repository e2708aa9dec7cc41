#include "shl/io/report.hpp"

#include <cmath>
#include <limits>

#include "shl/io/csv.hpp"

namespace shl::io {
namespace {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

double to_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  }
  throw json::type_error::create(302, "expected a number", &j);
}

json detail_value(const DetailValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
          return number(x);
        } else {
          return x;
        }
      },
      v);
}

DetailValue detail_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  const auto& s = j.get_ref<const std::string&>();
  if (s == "Infinity" || s == "-Infinity" || s == "NaN") return to_number(j);
  return s;
}

SignificanceSummary summary_from_json(const json& j) {
  SignificanceSummary s;
  s.n = j.at("n").get<std::size_t>();
  s.mean = to_number(j.at("mean"));
  s.s = to_number(j.at("s"));
  s.sem = to_number(j.at("sem"));
  s.k_sigma = to_number(j.at("k_sigma"));
  s.degenerate = j.at("degenerate").get<bool>();
  return s;
}

TestResult result_from_json(const json& j) {
  TestResult r;
  r.name = j.at("name").get<std::string>();
  r.statistic = to_number(j.at("statistic"));
  if (!j.at("dof").is_null()) r.dof = j.at("dof").get<std::int64_t>();
  r.p_value = to_number(j.at("p_value"));
  for (const auto& [key, value] : j.at("detail").items()) {
    r.detail[key] = detail_from_json(value);
  }
  return r;
}

Verdict verdict_from_string(const std::string& s) {
  for (const auto v : {Verdict::kHomogeneous, Verdict::kInhomogeneous,
                       Verdict::kInconclusive}) {
    if (to_string(v) == s) return v;
  }
  throw json::other_error::create(501, "unknown verdict '" + s + "'", nullptr);
}

HomogeneityReport homogeneity_from_json(const json& j) {
  HomogeneityReport h;
  h.alpha = to_number(j.at("alpha"));
  h.corrected_alpha = to_number(j.at("corrected_alpha"));
  h.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  for (const auto& r : j.at("results")) h.results.push_back(result_from_json(r));
  for (const auto& f : j.at("failures")) {
    h.failures.push_back({f.at("name").get<std::string>(),
                          f.at("error").get<std::string>(),
                          f.at("message").get<std::string>()});
  }
  return h;
}

template <typename T, typename F>
json optional_json(const std::optional<T>& v, F&& convert) {
  return v ? convert(*v) : json(nullptr);
}

}  // namespace

json to_json(const SignificanceSummary& s) {
  return json{{"n", s.n},
              {"mean", number(s.mean)},
              {"s", number(s.s)},
              {"sem", number(s.sem)},
              {"k_sigma", number(s.k_sigma)},
              {"degenerate", s.degenerate}};
}

json to_json(const TestResult& r) {
  json detail = json::object();
  for (const auto& [key, value] : r.detail) detail[key] = detail_value(value);
  return json{{"name", r.name},
              {"statistic", number(r.statistic)},
              {"dof", r.dof ? json(*r.dof) : json(nullptr)},
              {"p_value", number(r.p_value)},
              {"detail", std::move(detail)}};
}

json to_json(const HomogeneityReport& h) {
  json results = json::array();
  for (const auto& r : h.results) results.push_back(to_json(r));
  json failures = json::array();
  for (const auto& f : h.failures) {
    failures.push_back(
        {{"name", f.name}, {"error", f.error}, {"message", f.message}});
  }
  return json{{"alpha", number(h.alpha)},
              {"corrected_alpha", number(h.corrected_alpha)},
              {"verdict", std::string(to_string(h.verdict))},
              {"results", std::move(results)},
              {"failures", std::move(failures)}};
}

json to_json(const ReportDocument& report) {
  json j;
  j["command"] = report.command;
  j["config"] = report.config;
  j["significance"] = optional_json(
      report.significance, [](const auto& s) { return to_json(s); });
  if (!report.per_bin_j.empty()) {
    json values = json::array();
    for (const double v : report.per_bin_j) values.push_back(number(v));
    j["per_bin_j"] = std::move(values);
  }
  j["chebyshev_conf"] =
      optional_json(report.chebyshev_conf, [](double v) { return number(v); });
  j["cantelli_conf"] =
      optional_json(report.cantelli_conf, [](double v) { return number(v); });
  j["homogeneity"] = optional_json(
      report.homogeneity, [](const auto& h) { return to_json(h); });
  j["verdict_text"] = report.verdict_text;
  return j;
}

ReportDocument report_from_json(const json& j) {
  ReportDocument r;
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  if (!j.at("significance").is_null()) {
    r.significance = summary_from_json(j.at("significance"));
  }
  if (j.contains("per_bin_j")) {
    for (const auto& v : j.at("per_bin_j")) r.per_bin_j.push_back(to_number(v));
  }
  if (!j.at("chebyshev_conf").is_null()) {
    r.chebyshev_conf = to_number(j.at("chebyshev_conf"));
  }
  if (!j.at("cantelli_conf").is_null()) {
    r.cantelli_conf = to_number(j.at("cantelli_conf"));
  }
  if (!j.at("homogeneity").is_null()) {
    r.homogeneity = homogeneity_from_json(j.at("homogeneity"));
  }
  r.verdict_text = j.at("verdict_text").get<std::string>();
  return r;
}

std::string emit_report(const ReportDocument& report) {
  return to_json(report).dump(2) + "\n";
}

ReportDocument parse_report(std::string_view text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed report: ") + e.what());
  }
}

}  // namespace shl::io
