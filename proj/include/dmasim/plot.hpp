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

/// @file plot.hpp
/// Minimal self-contained SVG line charts for the sweep outputs. No external
/// renderer: the harness draws its own static vector files.

#pragma once

#include <string>
#include <vector>

namespace dmasim {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  ///< (x, y), pre-sorted by x
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool x_log2 = false;   ///< label ticks as powers of two
  double y_min = 0.0;
  double y_max = 1.0;
};

std::string render_line_chart_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);
void write_line_chart_svg(const std::string& path, const PlotSpec& spec,
                          const std::vector<PlotSeries>& series);

}  // namespace dmasim
