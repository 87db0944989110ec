#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "franson/counts.hpp"

namespace franson {

struct PlotLabels {
  std::string title;
  std::string x_axis;
  std::string y_axis = "coincidence probability";
  /// Multiplies positions before plotting (e.g. 1e6 for micrometres).
  double x_scale = 1.0;
};

/// Static SVG: axes with tick labels, the probability curve as a polyline
/// and, when present, the sampled counts rescaled to probability as points.
std::string render_svg(std::span<const CountRecord> records, const PlotLabels& labels,
                       double counts_per_unit_probability = 0.0);

void write_svg(const std::filesystem::path& path, std::span<const CountRecord> records,
               const PlotLabels& labels, double counts_per_unit_probability = 0.0);

}  // namespace franson
