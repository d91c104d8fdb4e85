#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cycletrack::plot {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool scatter = false;  // markers instead of a polyline
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string caption;
  std::vector<Series> series;
  int width = 860;
  int height = 480;
};

/// Self-contained SVG line/scatter plot with axes, ticks, and a legend.
std::string render_svg(const Figure& figure);
void save_svg(const Figure& figure, const std::string& path);

}  // namespace cycletrack::plot
