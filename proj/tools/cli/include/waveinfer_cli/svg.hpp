#pragma once

#include <span>
#include <string>
#include <vector>

namespace waveinfer::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool points = false;  ///< scatter markers instead of a polyline
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Optional horizontal reference lines (e.g. true parameter values).
  std::vector<double> reference_y;
  bool diagonal = false;  ///< draw y = x (Q-Q plots)
};

/// Standalone SVG document. Non-finite points are skipped.
std::string render_svg(const Chart& chart);

/// Normal Q-Q chart of `values` standardized by their sample mean and deviation,
/// plotted against Blom positions (i - 3/8) / (n + 1/4).
Chart qq_chart(std::string title, std::span<const double> values);

}  // namespace waveinfer::cli
