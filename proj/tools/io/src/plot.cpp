#include "shl/io/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace shl::io {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fixed(double v, int digits = 2) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::string general(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

std::string shortest(double v) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, ptr);
}

}  // namespace

std::string render_bins_svg(std::span<const double> per_bin_j,
                            const SignificanceSummary& summary) {
  const bool band = std::isfinite(summary.sem);
  double lo = 0.0, hi = 0.0;
  for (const double v : per_bin_j) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (band) {
    lo = std::min(lo, summary.mean - summary.sem);
    hi = std::max(hi, summary.mean + summary.sem);
  }
  if (hi - lo <= 0.0) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto y_of = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };
  const double n = std::max<double>(1.0, static_cast<double>(per_bin_j.size()));
  const double slot = plot_w / n;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) +
         "\" height=\"" + fixed(kHeight, 0) + "\" viewBox=\"0 0 " +
         fixed(kWidth, 0) + " " + fixed(kHeight, 0) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "  <text x=\"" + fixed(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">Per-bin J (n = " +
         std::to_string(per_bin_j.size()) + "): mean " + general(summary.mean) +
         " &#177; SEM " + general(summary.sem) + ", k = " +
         general(summary.k_sigma) + "</text>\n";

  if (band) {
    const double top = y_of(summary.mean + summary.sem);
    const double bottom = y_of(summary.mean - summary.sem);
    svg += "  <rect class=\"sem-band\" x=\"" + fixed(kLeft) + "\" y=\"" +
           fixed(top) + "\" width=\"" + fixed(plot_w) + "\" height=\"" +
           fixed(std::max(bottom - top, 0.5)) +
           "\" fill=\"#f4a261\" fill-opacity=\"0.35\"/>\n";
  }

  const double zero = y_of(0.0);
  svg += "  <g class=\"bins\" fill=\"#2a6f97\">\n";
  for (std::size_t i = 0; i < per_bin_j.size(); ++i) {
    const double y = y_of(per_bin_j[i]);
    const double x = kLeft + slot * static_cast<double>(i) + 0.1 * slot;
    svg += "    <rect x=\"" + fixed(x) + "\" y=\"" + fixed(std::min(y, zero)) +
           "\" width=\"" + fixed(0.8 * slot) + "\" height=\"" +
           fixed(std::fabs(zero - y)) + "\"><title>bin " + std::to_string(i + 1) +
           ": " + general(per_bin_j[i]) + "</title></rect>\n";
  }
  svg += "  </g>\n";

  svg += "  <line class=\"mean\" x1=\"" + fixed(kLeft) + "\" x2=\"" +
         fixed(kLeft + plot_w) + "\" y1=\"" + fixed(y_of(summary.mean)) +
         "\" y2=\"" + fixed(y_of(summary.mean)) +
         "\" stroke=\"#d62828\" stroke-width=\"2\"/>\n";
  svg += "  <line class=\"zero\" x1=\"" + fixed(kLeft) + "\" x2=\"" +
         fixed(kLeft + plot_w) + "\" y1=\"" + fixed(zero) + "\" y2=\"" +
         fixed(zero) + "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";

  // Axes and tick labels.
  svg += "  <line x1=\"" + fixed(kLeft) + "\" x2=\"" + fixed(kLeft) + "\" y1=\"" +
         fixed(kTop) + "\" y2=\"" + fixed(kTop + plot_h) +
         "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg += "  <text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(y_of(v) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           general(v) + "</text>\n";
  }
  svg += "  <text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" +
         fixed(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">bin</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string render_bins_tsv(std::span<const double> per_bin_j) {
  std::string out = "bin\tj\n";
  for (std::size_t i = 0; i < per_bin_j.size(); ++i) {
    out += std::to_string(i + 1) + "\t" + shortest(per_bin_j[i]) + "\n";
  }
  return out;
}

}  // namespace shl::io
