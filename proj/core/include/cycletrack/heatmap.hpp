#pragma once

#include <vector>

#include "cycletrack/types.hpp"

namespace cycletrack {

/// Dense single-channel grid, row-major.
struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Gaussian radius for a box: one third of the mean of width and height.
inline double sigma_from_bbox(double w, double h) { return (w + h) / 6.0; }

/// A rendered center point: position plus its Gaussian sigma.
struct RenderPoint {
  Vec2 center;
  double sigma;
};

/// Max-of-Gaussians rendering: each grid cell takes the largest
/// exp(-|p_i - q|^2 / (2 sigma_i^2)) over all points. Centers outside
/// [0,W) x [0,H) are an error.
Heatmap render_heatmap(const std::vector<RenderPoint>& points, int width, int height);

/// Convenience overload over tracklets' last boxes.
Heatmap render_heatmap(const std::vector<Tracklet>& tracked, int width, int height);

}  // namespace cycletrack
