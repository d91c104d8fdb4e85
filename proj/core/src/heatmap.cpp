#include "cycletrack/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cycletrack {

Heatmap render_heatmap(const std::vector<RenderPoint>& points, int width, int height) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("heatmap dimensions must be positive");
  for (const auto& pt : points) {
    if (pt.center.x() < 0.0 || pt.center.x() >= width || pt.center.y() < 0.0 ||
        pt.center.y() >= height)
      throw std::invalid_argument("render center out of bounds");
    if (pt.sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  }

  Heatmap map;
  map.width = width;
  map.height = height;
  map.values.assign(static_cast<std::size_t>(width) * height, 0.0);

  for (const auto& pt : points) {
    // Beyond ~4 sigma the Gaussian is below 3.4e-4; restrict to that window.
    const double reach = 4.0 * pt.sigma;
    const int x0 = std::max(0, static_cast<int>(std::floor(pt.center.x() - reach)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(pt.center.x() + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(pt.center.y() - reach)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(pt.center.y() + reach)));
    const double inv = 1.0 / (2.0 * pt.sigma * pt.sigma);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = pt.center.x() - x;
        const double dy = pt.center.y() - y;
        const double value = std::exp(-(dx * dx + dy * dy) * inv);
        double& cell = map.at(x, y);
        cell = std::max(cell, value);
      }
    }
  }
  return map;
}

Heatmap render_heatmap(const std::vector<Tracklet>& tracked, int width, int height) {
  std::vector<RenderPoint> points;
  points.reserve(tracked.size());
  for (const auto& tr : tracked) {
    const BBox& box = tr.last_box();
    points.push_back({box.center(), sigma_from_bbox(box.w, box.h)});
  }
  return render_heatmap(points, width, height);
}

}  // namespace cycletrack
