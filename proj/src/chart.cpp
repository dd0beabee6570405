#include "fidtrust/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fidtrust {

namespace {

constexpr double kWidth = 560.0;
constexpr double kHeight = 360.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 56.0;
constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v, const char* fmt = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

}  // namespace

std::string render_svg(const LineChart& chart) {
  if (chart.x.empty()) throw std::invalid_argument("chart: no points");
  if (!chart.x_ticks.empty() && chart.x_ticks.size() != chart.x.size()) {
    throw std::invalid_argument("chart: tick labels do not match points");
  }
  double x_lo = *std::min_element(chart.x.begin(), chart.x.end());
  double x_hi = *std::max_element(chart.x.begin(), chart.x.end());
  double y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  for (const auto& s : chart.series) {
    if (s.y.size() != chart.x.size()) throw std::invalid_argument("chart: series '" + s.name + "' length mismatch");
    for (const double v : s.y) {
      if (!std::isfinite(v)) throw std::invalid_argument("chart: non-finite value in '" + s.name + "'");
      y_lo = first ? v : std::min(y_lo, v);
      y_hi = first ? v : std::max(y_hi, v);
      first = false;
    }
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi == y_lo) {
    const double pad = y_lo == 0.0 ? 1.0 : std::abs(y_lo) * 0.1;
    y_lo -= pad;
    y_hi += pad;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, "%.0f") + "\" height=\"" +
                    num(kHeight, "%.0f") + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(chart.title) + "</text>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
         num(kTop + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(kTop + ph) +
         "\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = y_lo + (y_hi - y_lo) * t / 4.0;
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" +
           num(v, "%.4g") + "</text>\n";
  }
  for (std::size_t i = 0; i < chart.x.size(); ++i) {
    const std::string tick = chart.x_ticks.empty() ? num(chart.x[i], "%.4g") : chart.x_ticks[i];
    svg += "<text x=\"" + num(px(chart.x[i])) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           escape(tick) + "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
         escape(chart.x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& series = chart.series[s];
    const char* colour = kColours[s % std::size(kColours)];
    std::string points;
    for (std::size_t i = 0; i < chart.x.size(); ++i) {
      if (i) points += ' ';
      points += num(px(chart.x[i])) + "," + num(py(series.y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" points=\"" + points +
           "\"/>\n";
    for (std::size_t i = 0; i < chart.x.size(); ++i) {
      svg += "<circle cx=\"" + num(px(chart.x[i])) + "\" cy=\"" + num(py(series.y[i])) + "\" r=\"3\" fill=\"" +
             colour + "\"/>\n";
    }
    if (chart.series.size() > 1) {
      svg += "<text x=\"" + num(kLeft + pw - 4) + "\" y=\"" + num(kTop + 14.0 * static_cast<double>(s + 1)) +
             "\" text-anchor=\"end\" fill=\"" + colour + "\">" + escape(series.name) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace fidtrust
