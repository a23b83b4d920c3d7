// Copyright 2026 The sppm-phi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sppm/harness/config.hpp"

namespace sppm::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label = "k";
  std::string y_label = "|x_k - x*|^2 / |x_0 - x*|^2";
  std::vector<Series> series;
  double y_floor = 1e-16;  // log axis clip for zeros and underflow
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(target_ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

}  // namespace detail

/// Log-y line chart. Output depends only on the chart data.
inline std::string render_svg(const LineChart& chart) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double width = 720, height = 480;
  const double left = 80, right = 190, top = 40, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double x_min = 0.0, x_max = 1.0;
  double ly_min = 0.0, ly_max = 0.0;
  bool first = true;
  for (const Series& s : chart.series) {
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      const double ly = std::log10(std::max(std::isfinite(s.y[j]) ? s.y[j] : 1e300, chart.y_floor));
      if (first) {
        x_min = x_max = s.x[j];
        ly_min = ly_max = ly;
        first = false;
      }
      x_min = std::min(x_min, s.x[j]);
      x_max = std::max(x_max, s.x[j]);
      ly_min = std::min(ly_min, ly);
      ly_max = std::max(ly_max, ly);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  ly_min = std::floor(ly_min);
  ly_max = std::ceil(ly_max);
  if (ly_max <= ly_min) ly_max = ly_min + 1.0;

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double ly) { return top + (ly_max - ly) / (ly_max - ly_min) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fixed(width, 0) + "\" height=\"" +
         detail::fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fixed(left + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(chart.title) + "</text>\n";

  // y decades
  const int decades = static_cast<int>(ly_max - ly_min);
  const int y_every = std::max(1, decades / 10);
  for (int e = static_cast<int>(ly_min); e <= static_cast<int>(ly_max); e += y_every) {
    const double y = py(e);
    svg += "<line x1=\"" + detail::fixed(left) + "\" y1=\"" + detail::fixed(y) + "\" x2=\"" +
           detail::fixed(left + plot_w) + "\" y2=\"" + detail::fixed(y) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + detail::fixed(left - 6) + "\" y=\"" + detail::fixed(y + 4) +
           "\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
  }
  const double step = detail::nice_step(x_max - x_min, 6);
  for (double x = std::ceil(x_min / step) * step; x <= x_max + 1e-9 * step; x += step) {
    const double X = px(x);
    svg += "<line x1=\"" + detail::fixed(X) + "\" y1=\"" + detail::fixed(top) + "\" x2=\"" + detail::fixed(X) +
           "\" y2=\"" + detail::fixed(top + plot_h) + "\" stroke=\"#f0f0f0\"/>\n";
    svg += "<text x=\"" + detail::fixed(X) + "\" y=\"" + detail::fixed(top + plot_h + 18) +
           "\" text-anchor=\"middle\">" + format_double(x) + "</text>\n";
  }
  svg += "<rect x=\"" + detail::fixed(left) + "\" y=\"" + detail::fixed(top) + "\" width=\"" +
         detail::fixed(plot_w) + "\" height=\"" + detail::fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + detail::fixed(left + plot_w / 2) + "\" y=\"" + detail::fixed(height - 16) +
         "\" text-anchor=\"middle\">" + xml_escape(chart.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + detail::fixed(top + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + xml_escape(chart.y_label) + "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const Series& ser = chart.series[s];
    const char* color = kColors[s % std::size(kColors)];
    svg += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(color) + "\" points=\"";
    for (std::size_t j = 0; j < ser.x.size(); ++j) {
      const double v = std::isfinite(ser.y[j]) ? ser.y[j] : 1e300;
      const double ly = std::clamp(std::log10(std::max(v, chart.y_floor)), ly_min, ly_max);
      svg += (j ? " " : "") + detail::fixed(px(ser.x[j])) + "," + detail::fixed(py(ly));
    }
    svg += "\"/>\n";
    const double ly_leg = top + 10 + 20.0 * static_cast<double>(s);
    svg += "<line x1=\"" + detail::fixed(left + plot_w + 12) + "\" y1=\"" + detail::fixed(ly_leg) + "\" x2=\"" +
           detail::fixed(left + plot_w + 36) + "\" y2=\"" + detail::fixed(ly_leg) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fixed(left + plot_w + 42) + "\" y=\"" + detail::fixed(ly_leg + 4) + "\">" +
           xml_escape(ser.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace sppm::harness
