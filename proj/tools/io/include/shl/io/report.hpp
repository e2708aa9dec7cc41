#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shl/homogeneity.hpp"
#include "shl/stats.hpp"

namespace shl::io {

/// JSON document written by the audit and significance commands.
///
/// Non-finite numbers (a degenerate k_sigma, an unbounded SEM inflation
/// factor) are stored as the strings "Infinity", "-Infinity" and "NaN" so the
/// document stays valid JSON and parses back to the same values.
struct ReportDocument {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::optional<SignificanceSummary> significance;
  std::vector<double> per_bin_j;
  std::optional<double> chebyshev_conf;
  std::optional<double> cantelli_conf;
  std::optional<HomogeneityReport> homogeneity;
  std::string verdict_text;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

nlohmann::json to_json(const ReportDocument& report);
ReportDocument report_from_json(const nlohmann::json& j);

std::string emit_report(const ReportDocument& report);
/// Throws ParseError (line 0) on malformed JSON or a missing field.
ReportDocument parse_report(std::string_view text);

nlohmann::json to_json(const SignificanceSummary& s);
nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const HomogeneityReport& r);

}  // namespace shl::io
