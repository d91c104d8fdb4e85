#include "cycletrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cycletrack {

CostMatrix CostMatrix::filled(int rows, int cols, double value) {
  CostMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.data.assign(static_cast<std::size_t>(rows) * cols, value);
  return m;
}

Vec2 correct_with_base(const Vec2& d, const BaseVector& base) {
  if (!base) return d;
  const double base_norm = base->norm();
  if (base_norm == 0.0) return d;
  const double d_norm = d.norm();
  if (d_norm == 0.0) return *base;
  const double w = base->dot(d) / (base_norm * d_norm);
  return w * d + std::abs(1.0 - w) * (*base);
}

CostMatrix cost_ct(const std::vector<Vec2>& track_centers,
                   const std::vector<Vec2>& det_centers, const DisplacementSet& backward) {
  if (backward.vectors.size() != det_centers.size())
    throw std::invalid_argument("displacement set not aligned with detections");
  const int n = static_cast<int>(track_centers.size());
  const int m = static_cast<int>(det_centers.size());
  CostMatrix cost = CostMatrix::filled(n, m, kCostSentinel);
  for (int j = 0; j < m; ++j) {
    const auto& d = backward.vectors[static_cast<std::size_t>(j)];
    if (!d) continue;
    const Vec2 translated = det_centers[static_cast<std::size_t>(j)] + *d;
    for (int i = 0; i < n; ++i)
      cost.at(i, j) = (track_centers[static_cast<std::size_t>(i)] - translated).norm();
  }
  return cost;
}

CostMatrix cost_sort(const std::vector<Vec2>& track_centers,
                     const std::vector<Vec2>& det_centers,
                     const std::vector<Vec2>& forward) {
  if (forward.size() != track_centers.size())
    throw std::invalid_argument("one forward displacement per track required");
  const int n = static_cast<int>(track_centers.size());
  const int m = static_cast<int>(det_centers.size());
  CostMatrix cost = CostMatrix::filled(n, m, 0.0);
  for (int i = 0; i < n; ++i) {
    const Vec2 predicted =
        track_centers[static_cast<std::size_t>(i)] + forward[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j)
      cost.at(i, j) = (det_centers[static_cast<std::size_t>(j)] - predicted).norm();
  }
  return cost;
}

CostMatrix fuse_min(const CostMatrix& a, const CostMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("cost matrix shape mismatch");
  CostMatrix out = a;
  for (std::size_t k = 0; k < out.data.size(); ++k)
    out.data[k] = std::min(a.data[k], b.data[k]);
  return out;
}

double adaptive_threshold(const std::vector<Detection>& dets, double fallback_gate) {
  if (dets.size() < 2) return fallback_gate;
  double total = 0.0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (i == j) continue;
      nearest = std::min(nearest, (dets[i].box.center() - dets[j].box.center()).norm());
    }
    total += nearest;
  }
  return total / static_cast<double>(dets.size());
}

MatchPlan greedy_match(const CostMatrix& m, double gate) {
  if (gate <= 0.0) throw std::invalid_argument("gate must be > 0");

  struct Entry {
    double cost;
    int row;
    int col;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (m.at(i, j) <= gate) entries.push_back({m.at(i, j), i, j});

  // Ascending sweep over candidates equals repeatedly taking the global
  // minimum and deleting its row and column.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.cost, a.row, a.col) < std::tie(b.cost, b.row, b.col);
  });

  MatchPlan plan;
  std::vector<char> row_used(static_cast<std::size_t>(m.rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(m.cols), 0);
  for (const auto& e : entries) {
    if (row_used[static_cast<std::size_t>(e.row)] ||
        col_used[static_cast<std::size_t>(e.col)])
      continue;
    row_used[static_cast<std::size_t>(e.row)] = 1;
    col_used[static_cast<std::size_t>(e.col)] = 1;
    plan.pairs.push_back({e.row, e.col, e.cost});
  }
  for (int i = 0; i < m.rows; ++i)
    if (!row_used[static_cast<std::size_t>(i)]) plan.unmatched_tracks.push_back(i);
  for (int j = 0; j < m.cols; ++j)
    if (!col_used[static_cast<std::size_t>(j)]) plan.unmatched_dets.push_back(j);
  return plan;
}

BaseVector update_base(const MatchPlan& plan, const std::vector<Vec2>& matched_backward) {
  if (matched_backward.size() != plan.pairs.size())
    throw std::invalid_argument("one backward vector per matched pair required");
  if (plan.pairs.empty()) return std::nullopt;
  Vec2 sum = Vec2::Zero();
  for (const auto& v : matched_backward) sum += v;
  return sum / static_cast<double>(matched_backward.size());
}

}  // namespace cycletrack
