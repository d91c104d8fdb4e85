#pragma once

#include <optional>
#include <vector>

#include "cycletrack/displacement.hpp"
#include "cycletrack/types.hpp"

namespace cycletrack {

// Per-frame association: backward-translated and forward-predicted center
// distances, element-wise min fusion, adaptive gating, greedy matching.

/// Stands in for "no usable distance": larger than any real cost, loses to
/// every finite entry under min fusion, never passes a gate.
constexpr double kCostSentinel = 1e9;

/// N tracked objects x M detections, Euclidean center distances in pixels.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  static CostMatrix filled(int rows, int cols, double value);
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

struct MatchPair {
  int track = 0;
  int det = 0;
  double cost = 0.0;
};

struct MatchPlan {
  std::vector<MatchPair> pairs;
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_dets;
};

/// Mean matched backward displacement of the previous frame; absent before
/// the first frame with matches.
using BaseVector = std::optional<Vec2>;

/// Cosine-weighted blend of a displacement with the base vector:
/// w = cos(base, d), result = w*d + |1-w|*base. Absent or zero base leaves d
/// unchanged; zero d yields the base itself.
Vec2 correct_with_base(const Vec2& d, const BaseVector& base);

/// Backward-branch costs: |p_i(t-1) - (p_j(t) + d_j)| for each track i and
/// detection j. Detections without a displacement get sentinel columns.
CostMatrix cost_ct(const std::vector<Vec2>& track_centers,
                   const std::vector<Vec2>& det_centers, const DisplacementSet& backward);

/// Forward-branch costs: |p_j(t) - (p_i(t-1) + d_i)| with one forward
/// displacement per track.
CostMatrix cost_sort(const std::vector<Vec2>& track_centers,
                     const std::vector<Vec2>& det_centers,
                     const std::vector<Vec2>& forward);

/// Element-wise minimum; shapes must agree.
CostMatrix fuse_min(const CostMatrix& a, const CostMatrix& b);

/// Mean nearest-neighbor center distance within the frame; fallback_gate when
/// fewer than two detections exist.
double adaptive_threshold(const std::vector<Detection>& dets, double fallback_gate);

/// Commits the globally smallest remaining entry <= gate, removes its row and
/// column, repeats. Ties break on lowest (row, col).
MatchPlan greedy_match(const CostMatrix& m, double gate);

/// Component-wise mean of the matched pairs' backward vectors (one per pair,
/// in plan order); absent for an empty plan.
BaseVector update_base(const MatchPlan& plan, const std::vector<Vec2>& matched_backward);

}  // namespace cycletrack
