#pragma once

#include "cycletrack/types.hpp"

namespace cycletrack {

// Constant-velocity filter over (cx, cy, s, vx, vy, vs) with s = w*h.
// Only the 2-D center displacement feeds the forward association cost;
// the size channel is used for box prediction.

struct KalmanNoise {
  double init_pos_sigma = 1.0;    // px
  double init_vel_sigma = 10.0;   // px/frame
  double process_pos = 1e-2;      // px^2 per frame
  double process_vel = 1e-4;      // (px/frame)^2 per frame
  double meas_sigma = 1.0;        // px
};

struct KalmanPrediction {
  KalmanState state;   // advanced one frame, covariance inflated
  BBox box;            // predicted box at the new frame
  Vec2 displacement;   // predicted center minus previous mean center
};

/// New state from a detection: position and area from the box, zero velocity.
KalmanState kf_init(const Detection& det, const KalmanNoise& noise = {});

/// Advances the state one frame. Calling twice without an update advances two.
KalmanPrediction kf_predict(const KalmanState& state, const KalmanNoise& noise = {});

/// Measurement update on (cx, cy, s). Covariance is re-symmetrized to keep it
/// positive-definite through long runs.
KalmanState kf_update(const KalmanState& state, const Detection& det,
                      const KalmanNoise& noise = {});

/// Box reconstructed from a state's (cx, cy, s) and frozen aspect ratio.
BBox state_box(const KalmanState& state);

}  // namespace cycletrack
