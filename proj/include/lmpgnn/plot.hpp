#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "lmpgnn/errors.hpp"

namespace lmpgnn {

// Minimal deterministic SVG line charts; no external renderer needed and the
// output is byte-identical for identical inputs.

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // x is the sample index; NaN breaks the line
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* series_color(size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
                                  "#bcbd22", "#7f7f7f"};
  return palette[i % (sizeof palette / sizeof palette[0])];
}

}  // namespace detail

/// Render a line chart. With log_y the vertical axis is log10 and annotated
/// as such; nonpositive values are skipped there.
inline std::string render_line_chart(const std::string& title,
                                     const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<PlotSeries>& series,
                                     bool log_y = false) {
  if (series.empty()) throw ParameterError("no series to plot");
  const double width = 860, height = 520;
  const double ml = 70, mr = 180, mt = 42, mb = 52;
  const double pw = width - ml - mr, ph = height - mt - mb;

  size_t t_max = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    t_max = std::max(t_max, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v) || (log_y && v <= 0.0)) continue;
      const double y = log_y ? std::log10(v) : v;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  if (!(lo <= hi)) throw ParameterError("no finite data to plot");
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double x_span = t_max > 1 ? static_cast<double>(t_max - 1) : 1.0;
  auto px = [&](double t) { return ml + pw * (t / x_span); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - lo) / (hi - lo)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         detail::fmt(width) + "\" height=\"" + detail::fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fmt(ml) + "\" y=\"24\" font-size=\"16\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";

  // frame + horizontal grid with tick labels
  svg += "<rect x=\"" + detail::fmt(ml) + "\" y=\"" + detail::fmt(mt) +
         "\" width=\"" + detail::fmt(pw) + "\" height=\"" + detail::fmt(ph) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  const int n_ticks = 6;
  for (int i = 0; i <= n_ticks; ++i) {
    const double yv = lo + (hi - lo) * i / n_ticks;
    const double yy = py(yv);
    svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(yy) +
           "\" x2=\"" + detail::fmt(ml + pw) + "\" y2=\"" + detail::fmt(yy) +
           "\" stroke=\"#ddd\"/>\n";
    const std::string lab =
        log_y ? detail::fmt(std::pow(10.0, yv)) : detail::fmt(yv);
    svg += "<text x=\"" + detail::fmt(ml - 6) + "\" y=\"" +
           detail::fmt(yy + 4) + "\" font-size=\"11\" text-anchor=\"end\" "
           "font-family=\"sans-serif\">" + lab + "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double tv = x_span * i / 5;
    svg += "<text x=\"" + detail::fmt(px(tv)) + "\" y=\"" +
           detail::fmt(mt + ph + 18) + "\" font-size=\"11\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">" +
           detail::fmt(std::round(tv)) + "</text>\n";
  }
  svg += "<text x=\"" + detail::fmt(ml + pw / 2) + "\" y=\"" +
         detail::fmt(height - 14) + "\" font-size=\"13\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\">" + x_label + "</text>\n";
  const std::string y_title = log_y ? y_label + " (log scale)" : y_label;
  svg += "<text x=\"18\" y=\"" + detail::fmt(mt + ph / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 " + detail::fmt(mt + ph / 2) + ")\">" +
         y_title + "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    std::string points;
    bool open = false;
    for (size_t t = 0; t < series[s].values.size(); ++t) {
      const double v = series[s].values[t];
      if (!std::isfinite(v) || (log_y && v <= 0.0)) {
        if (open) points += "\" fill=\"none\" stroke=\"" +
                            std::string(detail::series_color(s)) +
                            "\" stroke-width=\"1.5\"/>\n";
        open = false;
        continue;
      }
      const double y = log_y ? std::log10(v) : v;
      if (!open) {
        points += "<polyline points=\"";
        open = true;
      }
      points += detail::fmt(px(static_cast<double>(t))) + "," +
                detail::fmt(py(y)) + " ";
    }
    if (open)
      points += "\" fill=\"none\" stroke=\"" +
                std::string(detail::series_color(s)) +
                "\" stroke-width=\"1.5\"/>\n";
    svg += points;
    const double ly = mt + 18.0 * (s + 1);
    svg += "<line x1=\"" + detail::fmt(ml + pw + 12) + "\" y1=\"" +
           detail::fmt(ly - 4) + "\" x2=\"" + detail::fmt(ml + pw + 34) +
           "\" y2=\"" + detail::fmt(ly - 4) + "\" stroke=\"" +
           detail::series_color(s) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fmt(ml + pw + 40) + "\" y=\"" +
           detail::fmt(ly) + "\" font-size=\"12\" font-family=\"sans-serif\">" +
           series[s].label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_svg(const std::string& svg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open for writing");
  out << svg;
  if (!out) throw ParseError(path, 0, "write failed");
}

}  // namespace lmpgnn
