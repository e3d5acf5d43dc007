//
// Copyright 2026 The wmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef WMCOLLIDE_PLOT_H_
#define WMCOLLIDE_PLOT_H_

#include <filesystem>
#include <string>
#include <vector>

namespace wmcollide {

// Minimal SVG charts; no plotting library is needed to read them.

struct HistogramSeries {
  std::string name;
  std::vector<double> values;
  std::string color;  // any SVG color
};

struct Marker {
  std::string label;
  double x = 0.0;
};

struct HistogramPanel {
  std::string title;
  std::vector<HistogramSeries> series;  // drawn as per-series frequencies
  std::vector<Marker> markers;          // vertical lines
};

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per series, in [0, 1]
};

// Throws kIoError when the file cannot be written.
void WriteHistogramSvg(const std::filesystem::path& path, const std::string& title,
                       const std::vector<HistogramPanel>& panels, int bins = 30);
void WriteBarChartSvg(const std::filesystem::path& path, const std::string& title,
                      const std::vector<std::string>& series_names,
                      const std::vector<BarGroup>& groups);

}  // namespace wmcollide

#endif  // WMCOLLIDE_PLOT_H_
