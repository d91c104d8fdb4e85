#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cycletrack {

using Vec2 = Eigen::Vector2d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Thrown by file parsers; carries the 1-based offending line number.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t line)
      : std::runtime_error(std::move(message)), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Axis-aligned box in center form. Width and height are strictly positive.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  Vec2 center() const { return {cx, cy}; }
  double area() const { return w * h; }
  double left() const { return cx - 0.5 * w; }
  double top() const { return cy - 0.5 * h; }

  bool valid() const {
    return w > 0.0 && h > 0.0 && std::isfinite(cx) && std::isfinite(cy) &&
           std::isfinite(w) && std::isfinite(h);
  }
};

/// One detected object in one frame. `id` is absent for raw detector output
/// and positive for ground-truth or hypothesis boxes.
struct Detection {
  int frame = 1;  // 1-based
  BBox box;
  double conf = 1.0;  // in [0, 1]
  std::optional<std::int64_t> id;
};

struct KalmanState {
  // mean = (cx, cy, s, vx, vy, vs) with s = w*h; aspect ratio is held
  // outside the filter and refreshed on update.
  Vec6 mean = Vec6::Zero();
  Mat6 covariance = Mat6::Identity();
  double w_over_h = 1.0;
};

/// A single tracked identity: observation history plus motion state.
struct Tracklet {
  std::int64_t id = 0;  // positive, unique within a run
  std::vector<std::pair<int, BBox>> history;  // (frame, box), frames strictly increasing
  KalmanState kalman;
  int hits = 0;
  int misses_in_row = 0;
  bool confirmed = false;

  int first_frame() const { return history.empty() ? 0 : history.front().first; }
  int last_frame() const { return history.empty() ? 0 : history.back().first; }
  const BBox& last_box() const { return history.back().second; }
};

enum class FusionMode { kCycle, kSortOnly, kCtOnly };

std::string to_string(FusionMode mode);
FusionMode fusion_mode_from_string(const std::string& name);

struct TrackerConfig {
  double conf_threshold = 0.6;
  int max_age = 0;       // consecutive misses tolerated before termination
  int min_hits = 2;      // hits needed for a tracklet to count as a cell
  bool base_blend_enabled = true;
  double fallback_gate = 50.0;  // pixels, used when a frame has < 2 detections
  FusionMode fusion_mode = FusionMode::kCycle;

  void validate() const {
    if (conf_threshold < 0.0 || conf_threshold > 1.0)
      throw std::invalid_argument("conf_threshold must be in [0,1]");
    if (max_age < 0) throw std::invalid_argument("max_age must be >= 0");
    if (min_hits < 1) throw std::invalid_argument("min_hits must be >= 1");
    if (fallback_gate <= 0.0) throw std::invalid_argument("fallback_gate must be > 0");
  }
};

}  // namespace cycletrack
