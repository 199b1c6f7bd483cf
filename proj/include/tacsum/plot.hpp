#pragma once

// Static SVG chart of flat vs. biased per-sample scores with key positions
// marked and partition boundaries shaded.

#include "tacsum/model.hpp"

#include <algorithm>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>

namespace tacsum {

inline std::string score_plot_svg(std::span<const double> flat, std::span<const double> biased,
                                  std::span<const std::size_t> keys, const PartitionSet& parts,
                                  int width = 960, int height = 320) {
  const double margin = 40.0;
  const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
  double top = 1.0;
  for (double v : flat) top = std::max(top, v);
  for (double v : biased) top = std::max(top, v);
  const std::size_t n = std::max<std::size_t>(flat.size(), 2);

  auto x = [&](double i) { return margin + plot_w * i / static_cast<double>(n - 1); };
  auto y = [&](double v) { return margin + plot_h * (1.0 - v / (top * 1.05)); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto polyline = [&](std::span<const double> values, const char* color, const char* dash) {
    std::ostringstream s;
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << " points=\"";
    for (std::size_t i = 0; i < values.size(); ++i)
      s << (i ? " " : "") << num(x(static_cast<double>(i))) << ',' << num(y(values[i]));
    s << "\"/>\n";
    return s.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < parts.parts.size(); ++i) {
    if (i % 2 == 0) continue;
    const auto& p = parts.parts[i];
    svg << "<rect x=\"" << num(x(static_cast<double>(p.begin))) << "\" y=\"" << num(margin) << "\" width=\""
        << num(x(static_cast<double>(p.end - 1)) - x(static_cast<double>(p.begin))) << "\" height=\"" << num(plot_h)
        << "\" fill=\"#eeeeee\"/>\n";
  }
  svg << "<line x1=\"" << num(margin) << "\" y1=\"" << num(margin + plot_h) << "\" x2=\"" << num(margin + plot_w)
      << "\" y2=\"" << num(margin + plot_h) << "\" stroke=\"black\"/>\n";
  svg << polyline(flat, "#888888", " stroke-dasharray=\"4 3\"");
  svg << polyline(biased, "#d62728", "");
  for (auto k : keys) {
    if (k >= biased.size()) continue;
    svg << "<circle cx=\"" << num(x(static_cast<double>(k))) << "\" cy=\"" << num(y(biased[k]))
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  svg << "<text x=\"" << num(margin) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">"
      << "flat (dashed) vs biased (solid); dots mark keyframes</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tacsum
