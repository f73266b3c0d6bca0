#include "blackwell/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "blackwell/errors.hpp"

namespace blackwell {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_chart(const LineChart& chart) {
  const double margin_l = 64, margin_r = 16, margin_t = 36, margin_b = 48;
  const double plot_w = chart.width - margin_l - margin_r;
  const double plot_h = chart.height - margin_t - margin_b;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
  auto eat = [&](double x, double y) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  };
  for (const auto& s : chart.series) {
    for (const auto& [x, y] : s.points) eat(x, y);
  }
  for (const auto& b : chart.bands) {
    for (size_t i = 0; i < b.x.size(); ++i) {
      eat(b.x[i], b.lower[i]);
      eat(b.x[i], b.upper[i]);
    }
  }
  if (!(x_min <= x_max)) throw ValidationError("render_line_chart: no data");
  if (chart.log_x && x_min <= 0.0) {
    throw ValidationError("render_line_chart: log axis needs positive x");
  }
  if (y_min == y_max) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double pad = 0.04 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto xt = [&](double x) {
    const double lo = chart.log_x ? std::log10(x_min) : x_min;
    const double hi = chart.log_x ? std::log10(x_max) : x_max;
    const double v = chart.log_x ? std::log10(x) : x;
    const double f = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return margin_l + f * plot_w;
  };
  auto yt = [&](double y) { return margin_t + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) +
         "\" height=\"" + std::to_string(chart.height) + "\" viewBox=\"0 0 " +
         std::to_string(chart.width) + " " + std::to_string(chart.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(chart.width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" + escape(chart.title) + "</text>\n";

  for (const auto& b : chart.bands) {
    std::string pts;
    for (size_t i = 0; i < b.x.size(); ++i) {
      pts += num(xt(b.x[i])) + "," + num(yt(b.upper[i])) + " ";
    }
    for (size_t i = b.x.size(); i-- > 0;) {
      pts += num(xt(b.x[i])) + "," + num(yt(b.lower[i])) + " ";
    }
    svg += "<polygon points=\"" + pts + "\" fill=\"" + b.color +
           "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
  }

  // Axes box and tick labels.
  svg += "<rect x=\"" + num(margin_l) + "\" y=\"" + num(margin_t) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double f = static_cast<double>(i) / n_ticks;
    double xv;
    if (chart.log_x) {
      xv = std::pow(10.0, std::log10(x_min) + f * (std::log10(x_max) - std::log10(x_min)));
    } else {
      xv = x_min + f * (x_max - x_min);
    }
    const double yv = y_min + f * (y_max - y_min);
    svg += "<text x=\"" + num(xt(xv)) + "\" y=\"" + num(margin_t + plot_h + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
           num(xv) + "</text>\n";
    svg += "<text x=\"" + num(margin_l - 6) + "\" y=\"" + num(yt(yv) + 3) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(yv) +
           "</text>\n";
  }
  svg += "<text x=\"" + num(margin_l + plot_w / 2) + "\" y=\"" +
         num(chart.height - 10.0) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" + escape(chart.x_label) + "</text>\n";
  svg += "<text x=\"14\" y=\"" + num(margin_t + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 14 " + num(margin_t + plot_h / 2) + ")\">" +
         escape(chart.y_label) + "</text>\n";

  int legend_y = static_cast<int>(margin_t) + 14;
  for (const auto& s : chart.series) {
    std::string pts;
    for (const auto& [x, y] : s.points) pts += num(xt(x)) + "," + num(yt(y)) + " ";
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"" + (s.dashed ? " stroke-dasharray=\"5,4\"" : "") + "/>\n";
    if (!s.label.empty()) {
      svg += "<line x1=\"" + num(margin_l + plot_w - 130) + "\" y1=\"" + num(legend_y - 4.0) +
             "\" x2=\"" + num(margin_l + plot_w - 110) + "\" y2=\"" + num(legend_y - 4.0) +
             "\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
             (s.dashed ? " stroke-dasharray=\"5,4\"" : "") + "/>\n";
      svg += "<text x=\"" + num(margin_l + plot_w - 104) + "\" y=\"" + num(legend_y + 0.0) +
             "\" font-family=\"sans-serif\" font-size=\"10\">" + escape(s.label) + "</text>\n";
      legend_y += 14;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace blackwell
