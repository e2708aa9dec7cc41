#pragma once

// CSV schemas shared by the CLI.
//
//   outcomes  run_id,t,outcome            outcome in 1..6, t increasing per run
//   values    run_id,value                real-valued runs (e.g. per-bin J)
//   counts    a,b,bin,n_oo,n_oe,n_eo,n_ee,n_ou,n_uo,n_eu,n_ue,n_uu,nA_o,nB_o,trials
//
// Headers must match exactly. Readers report the 1-based line of the first
// problem through ParseError.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shl/eberhard.hpp"
#include "shl/homogeneity.hpp"

namespace shl::io {

inline constexpr std::string_view kOutcomesHeader = "run_id,t,outcome";
inline constexpr std::string_view kValuesHeader = "run_id,value";
inline constexpr std::string_view kCountsHeader =
    "a,b,bin,n_oo,n_oe,n_eo,n_ee,n_ou,n_uo,n_eu,n_ue,n_uu,nA_o,nB_o,trials";
inline constexpr std::int32_t kOutcomeCategories = 6;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TableKind { kOutcomes, kValues, kCounts, kUnknown };

/// Classifies a file by its header line.
TableKind sniff(std::string_view text) noexcept;

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file in the same directory, then renames.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string format_outcomes(const RunSet& runs);
/// Runs appear in order of first occurrence; m is set to 6.
RunSet parse_outcomes(std::string_view text);

std::string format_values(const RunSet& runs);
RunSet parse_values(std::string_view text);

std::string format_counts(std::span<const SettingCounts> counts);
std::vector<SettingCounts> parse_counts(std::string_view text);

}  // namespace shl::io
