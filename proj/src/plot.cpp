/*
 * Copyright 2026 the dmasim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dmasim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmasim {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kMarginL = 70;
constexpr double kMarginR = 20;
constexpr double kMarginT = 40;
constexpr double kMarginB = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double x, bool log2_axis) {
  char buf[48];
  if (log2_axis) {
    const double real = std::exp2(x);
    if (real >= 1024) {
      std::snprintf(buf, sizeof buf, "%.0fK", real / 1024.0);
    } else {
      std::snprintf(buf, sizeof buf, "%.0f", real);
    }
  } else {
    std::snprintf(buf, sizeof buf, "%g", x);
  }
  return buf;
}

}  // namespace

std::string render_line_chart_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  double x_min = 0, x_max = 1;
  bool got = false;
  for (const PlotSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      const double xv = spec.x_log2 ? std::log2(x) : x;
      if (!got) {
        x_min = x_max = xv;
        got = true;
      }
      x_min = std::min(x_min, xv);
      x_max = std::max(x_max, xv);
    }
  }
  if (!got) x_max = 1;
  if (x_max == x_min) x_max = x_min + 1;
  const double y_min = spec.y_min;
  const double y_max = spec.y_max > spec.y_min ? spec.y_max : spec.y_min + 1;

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto sx = [&](double x) {
    const double xv = spec.x_log2 ? std::log2(x) : x;
    return kMarginL + (xv - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double y) {
    return kMarginT + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << spec.title << "</text>\n";

  // Gridlines and ticks.
  const int y_ticks = 5;
  for (int i = 0; i <= y_ticks; ++i) {
    const double y = y_min + (y_max - y_min) * i / y_ticks;
    const double py = sy(y);
    svg << "<line x1=\"" << kMarginL << "\" y1=\"" << py << "\" x2=\"" << kWidth - kMarginR
        << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << kMarginL - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(y)
        << "</text>\n";
  }
  const int x_ticks = spec.x_log2 ? static_cast<int>(std::lround(x_max - x_min)) : 6;
  for (int i = 0; i <= x_ticks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / std::max(1, x_ticks);
    const double px = kMarginL + (xv - x_min) / (x_max - x_min) * plot_w;
    svg << "<line x1=\"" << px << "\" y1=\"" << kMarginT << "\" x2=\"" << px << "\" y2=\""
        << kHeight - kMarginB << "\" stroke=\"#eeeeee\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << kHeight - kMarginB + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(xv, spec.x_log2) << "</text>\n";
  }
  svg << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n"
      << "<text x=\"" << kMarginL + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << spec.x_label
      << "</text>\n"
      << "<text x=\"16\" y=\"" << kMarginT + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << kMarginT + plot_h / 2 << ")\">" << spec.y_label
      << "</text>\n";

  // Series.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    if (s.points.empty()) continue;
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
    svg << " points=\"";
    for (const auto& [x, y] : s.points) svg << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y)) << "\" r=\"2.5\" fill=\""
          << color << "\"/>\n";
    }
    // Legend entry.
    const double ly = kMarginT + 16 + 18 * static_cast<double>(i);
    const double lx = kMarginL + 12;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
        << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_line_chart_svg(const std::string& path, const PlotSpec& spec,
                          const std::vector<PlotSeries>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot file: " + path);
  out << render_line_chart_svg(spec, series);
}

}  // namespace dmasim
