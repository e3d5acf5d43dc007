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

#include "wmcollide/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wmcollide/error.h"

namespace wmcollide {
namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 240.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 150.0;  // room for the legend
constexpr double kTop = 36.0;
constexpr double kBottom = 36.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void Save(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << svg;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string Text(double x, double y, const std::string& s, const char* anchor = "start",
                 int size = 11) {
  return "<text x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\">" + Escape(s) + "</text>\n";
}

std::string Line(double x1, double y1, double x2, double y2, const std::string& style) {
  return "<line x1=\"" + Num(x1) + "\" y1=\"" + Num(y1) + "\" x2=\"" + Num(x2) + "\" y2=\"" +
         Num(y2) + "\" " + style + "/>\n";
}

std::string Rect(double x, double y, double w, double h, const std::string& style) {
  return "<rect x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" width=\"" + Num(w) + "\" height=\"" +
         Num(h) + "\" " + style + "/>\n";
}

std::string Header(double width, double height, const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(width) + "\" height=\"" +
         Num(height) + "\" font-family=\"sans-serif\">\n" +
         Rect(0, 0, width, height, "fill=\"white\"") + Text(width / 2, 18, title, "middle", 13);
}

}  // namespace

void WriteHistogramSvg(const std::filesystem::path& path, const std::string& title,
                       const std::vector<HistogramPanel>& panels, int bins) {
  if (bins < 1) throw Error(ErrorCode::kBadConfig, "histogram needs at least one bin");
  const double height = kTop + panels.size() * (kPanelHeight + kBottom);
  std::string svg = Header(kWidth + kRight, height, title);
  const double plot_w = kWidth - kLeft;
  const double plot_h = kPanelHeight - 40.0;
  for (size_t k = 0; k < panels.size(); ++k) {
    const auto& panel = panels[k];
    const double top = kTop + k * (kPanelHeight + kBottom) + 20.0;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : panel.series) {
      for (double v : s.values) {
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
      }
    }
    for (const auto& m : panel.markers) {
      if (std::isfinite(m.x)) lo = std::min(lo, m.x), hi = std::max(hi, m.x);
    }
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
    const double width = (hi - lo) / bins;
    std::vector<std::vector<double>> freq;
    double peak = 0.0;
    for (const auto& s : panel.series) {
      std::vector<double> f(bins, 0.0);
      for (double v : s.values) {
        if (!std::isfinite(v)) continue;
        const int b = std::clamp(static_cast<int>((v - lo) / width), 0, bins - 1);
        f[b] += 1.0;
      }
      for (double& x : f) {
        if (!s.values.empty()) x /= static_cast<double>(s.values.size());
        peak = std::max(peak, x);
      }
      freq.push_back(std::move(f));
    }
    if (peak <= 0.0) peak = 1.0;
    auto px = [&](double v) { return kLeft + (v - lo) / (hi - lo) * plot_w; };
    svg += Text(kLeft, top - 6, panel.title, "start", 12);
    for (size_t s = 0; s < freq.size(); ++s) {
      const std::string color = panel.series[s].color.empty()
                                    ? kPalette[s % std::size(kPalette)]
                                    : panel.series[s].color;
      for (int b = 0; b < bins; ++b) {
        if (freq[s][b] <= 0.0) continue;
        const double h = freq[s][b] / peak * plot_h;
        svg += Rect(px(lo + b * width), top + plot_h - h, plot_w / bins, h,
                    "fill=\"" + color + "\" fill-opacity=\"0.45\"");
      }
      svg += Rect(kWidth + 10, top + 14 * s, 10, 10, "fill=\"" + color + "\"");
      svg += Text(kWidth + 24, top + 14 * s + 9, panel.series[s].name);
    }
    for (const auto& m : panel.markers) {
      if (!std::isfinite(m.x)) continue;
      svg += Line(px(m.x), top, px(m.x), top + plot_h, "stroke=\"black\" stroke-dasharray=\"4 3\"");
      svg += Text(px(m.x) + 2, top + 10, m.label, "start", 9);
    }
    svg += Line(kLeft, top + plot_h, kWidth, top + plot_h, "stroke=\"black\"");
    svg += Line(kLeft, top, kLeft, top + plot_h, "stroke=\"black\"");
    for (int t = 0; t <= 4; ++t) {
      const double v = lo + (hi - lo) * t / 4.0;
      svg += Text(px(v), top + plot_h + 14, Num(v), "middle", 10);
    }
    svg += Text(kLeft - 6, top + 8, "freq", "end", 10);
  }
  svg += "</svg>\n";
  Save(path, svg);
}

void WriteBarChartSvg(const std::filesystem::path& path, const std::string& title,
                      const std::vector<std::string>& series_names,
                      const std::vector<BarGroup>& groups) {
  const double bar = 14.0;
  const double group_w = bar * std::max<size_t>(series_names.size(), 1) + 24.0;
  const double plot_h = 220.0;
  const double width = kLeft + group_w * groups.size() + kRight;
  const double top = kTop + 10.0;
  std::string svg = Header(width, top + plot_h + 60.0, title);
  auto py = [&](double v) { return top + plot_h - std::clamp(v, 0.0, 1.0) * plot_h; };
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    svg += Line(kLeft, py(v), kLeft + group_w * groups.size(), py(v),
                "stroke=\"#dddddd\"");
    svg += Text(kLeft - 6, py(v) + 4, Num(v), "end", 10);
  }
  for (size_t g = 0; g < groups.size(); ++g) {
    const double x0 = kLeft + g * group_w + 12.0;
    for (size_t s = 0; s < groups[g].values.size(); ++s) {
      const double v = groups[g].values[s];
      if (!std::isfinite(v)) continue;
      svg += Rect(x0 + s * bar, py(v), bar - 2, plot_h - (py(v) - top),
                  std::string("fill=\"") + kPalette[s % std::size(kPalette)] + "\"");
    }
    svg += Text(x0 + (group_w - 24.0) / 2, top + plot_h + 16, groups[g].label, "middle", 10);
  }
  svg += Line(kLeft, top + plot_h, kLeft + group_w * groups.size(), top + plot_h,
              "stroke=\"black\"");
  const double legend_x = kLeft + group_w * groups.size() + 12.0;
  for (size_t s = 0; s < series_names.size(); ++s) {
    svg += Rect(legend_x, top + 14 * s, 10, 10,
                std::string("fill=\"") + kPalette[s % std::size(kPalette)] + "\"");
    svg += Text(legend_x + 14, top + 14 * s + 9, series_names[s]);
  }
  svg += "</svg>\n";
  Save(path, svg);
}

}  // namespace wmcollide
