#include "franson/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "franson/errors.hpp"

namespace franson {

namespace {

constexpr double width = 720, height = 440;
constexpr double left = 80, right = 24, top = 40, bottom = 64;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round-number tick spacing giving roughly `target` intervals.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

}  // namespace

std::string render_svg(std::span<const CountRecord> records, const PlotLabels& labels,
                       double counts_per_unit_probability) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!records.empty()) {
    x0 = x1 = records.front().position * labels.x_scale;
    for (const auto& r : records) {
      const double x = r.position * labels.x_scale;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      if (std::isfinite(r.probability)) y1 = std::max(y1, r.probability);
      if (r.counts && counts_per_unit_probability > 0) {
        y1 = std::max(y1, static_cast<double>(*r.counts) / counts_per_unit_probability);
      }
    }
    if (x1 == x0) x1 = x0 + 1;
  }
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  fmt::memory_buffer b;
  auto out = std::back_inserter(b);
  fmt::format_to(out,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
                 "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                 width, height, width, height);
  fmt::format_to(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  fmt::format_to(out, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                 width / 2, escape(labels.title));

  // axes
  fmt::format_to(out,
                 "<g stroke=\"black\" fill=\"none\"><line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>"
                 "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\"/></g>\n",
                 left, top + ph, left + pw, top);
  const double xs = tick_step(x1 - x0, 6);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    const double v = std::abs(t) < 1e-12 * xs ? 0.0 : t;
    fmt::format_to(out,
                   "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
                   "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:.6g}</text>\n",
                   sx(t), top + ph, top + ph + 5, top + ph + 20, v);
  }
  const double ys = tick_step(y1 - y0, 5);
  for (double t = 0; t <= y1 + 1e-9; t += ys) {
    fmt::format_to(out,
                   "<line x1=\"{0}\" y1=\"{2:.2f}\" x2=\"{1}\" y2=\"{2:.2f}\" stroke=\"black\"/>"
                   "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.3g}</text>\n",
                   left - 5, left, sy(t), left - 8, sy(t) + 4, t);
  }
  fmt::format_to(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                 height - 16, escape(labels.x_axis));
  fmt::format_to(out,
                 "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}"
                 "</text>\n",
                 top + ph / 2, escape(labels.y_axis));

  fmt::format_to(out, "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"");
  for (const auto& r : records) {
    if (!std::isfinite(r.probability)) continue;
    fmt::format_to(out, "{:.2f},{:.2f} ", sx(r.position * labels.x_scale), sy(r.probability));
  }
  fmt::format_to(out, "\"/>\n");

  if (counts_per_unit_probability > 0) {
    fmt::format_to(out, "<g fill=\"#c0392b\">\n");
    for (const auto& r : records) {
      if (!r.counts) continue;
      fmt::format_to(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\"/>\n",
                     sx(r.position * labels.x_scale),
                     sy(static_cast<double>(*r.counts) / counts_per_unit_probability));
    }
    fmt::format_to(out, "</g>\n");
  }
  fmt::format_to(out, "</svg>\n");
  return fmt::to_string(b);
}

void write_svg(const std::filesystem::path& path, std::span<const CountRecord> records,
               const PlotLabels& labels, double counts_per_unit_probability) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_svg(records, labels, counts_per_unit_probability);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace franson
