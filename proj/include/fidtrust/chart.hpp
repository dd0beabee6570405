#pragma once

#include <string>
#include <vector>

namespace fidtrust {

struct ChartSeries {
  std::string name;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<std::string> x_ticks;  // optional; replaces numeric x tick text
  std::vector<ChartSeries> series;
};

/// Hand-written SVG with one polyline per series. Output depends only on
/// the chart contents.
std::string render_svg(const LineChart& chart);

}  // namespace fidtrust
