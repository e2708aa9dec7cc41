#pragma once

#include <span>
#include <string>

#include "shl/stats.hpp"

namespace shl::io {

/// Standalone SVG: one bar per bin (J value), the mean as a line and a shaded
/// mean +/- SEM band, with a dashed zero line for the H0 boundary.
std::string render_bins_svg(std::span<const double> per_bin_j,
                            const SignificanceSummary& summary);

/// "bin\tj" header then one row per bin (1-based).
std::string render_bins_tsv(std::span<const double> per_bin_j);

}  // namespace shl::io
