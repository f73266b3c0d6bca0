#pragma once

#include <string>
#include <vector>

namespace blackwell {

// Minimal deterministic SVG line charts: fixed-size canvas, optional log-x,
// series drawn in input order, no timestamps or generator marks.
struct ChartSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

struct ChartBand {  // shaded region between two curves sharing x values
  std::string color;
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<ChartSeries> series;
  std::vector<ChartBand> bands;
  int width = 720;
  int height = 440;
};

std::string render_line_chart(const LineChart& chart);

}  // namespace blackwell
