#include "cycletrack/kalman.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace cycletrack {
namespace {

constexpr double kMinArea = 1e-4;

Mat6 transition() {
  Mat6 f = Mat6::Identity();
  f(0, 3) = 1.0;
  f(1, 4) = 1.0;
  f(2, 5) = 1.0;
  return f;
}

Eigen::Matrix<double, 3, 6> measurement() {
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  h(2, 2) = 1.0;
  return h;
}

Mat6 process_noise(const KalmanNoise& noise) {
  Vec6 diag;
  diag << noise.process_pos, noise.process_pos, noise.process_pos,
      noise.process_vel, noise.process_vel, noise.process_vel;
  return diag.asDiagonal();
}

void symmetrize(Mat6& p) { p = 0.5 * (p + p.transpose()); }

}  // namespace

KalmanState kf_init(const Detection& det, const KalmanNoise& noise) {
  KalmanState state;
  state.mean << det.box.cx, det.box.cy, det.box.area(), 0.0, 0.0, 0.0;
  Vec6 diag;
  const double p0 = noise.init_pos_sigma * noise.init_pos_sigma;
  const double v0 = noise.init_vel_sigma * noise.init_vel_sigma;
  diag << p0, p0, p0, v0, v0, v0;
  state.covariance = diag.asDiagonal();
  state.w_over_h = det.box.w / det.box.h;
  return state;
}

KalmanPrediction kf_predict(const KalmanState& state, const KalmanNoise& noise) {
  const Mat6 f = transition();
  KalmanPrediction pred;
  pred.state = state;
  pred.state.mean = f * state.mean;
  pred.state.covariance = f * state.covariance * f.transpose() + process_noise(noise);
  symmetrize(pred.state.covariance);
  pred.state.mean(2) = std::max(pred.state.mean(2), kMinArea);
  pred.box = state_box(pred.state);
  pred.displacement = pred.state.mean.head<2>() - state.mean.head<2>();
  return pred;
}

KalmanState kf_update(const KalmanState& state, const Detection& det,
                      const KalmanNoise& noise) {
  const auto h = measurement();
  const double r = noise.meas_sigma * noise.meas_sigma;
  const Eigen::Matrix3d meas_cov = Eigen::Matrix3d::Identity() * r;

  Eigen::Vector3d z(det.box.cx, det.box.cy, det.box.area());
  Eigen::Vector3d innovation = z - h * state.mean;
  Eigen::Matrix3d s = h * state.covariance * h.transpose() + meas_cov;
  Eigen::Matrix<double, 6, 3> gain = state.covariance * h.transpose() * s.inverse();

  KalmanState next = state;
  next.mean = state.mean + gain * innovation;
  next.mean(2) = std::max(next.mean(2), kMinArea);
  Mat6 identity_minus = Mat6::Identity() - gain * h;
  // Joseph form keeps the covariance PSD under roundoff.
  next.covariance = identity_minus * state.covariance * identity_minus.transpose() +
                    gain * meas_cov * gain.transpose();
  symmetrize(next.covariance);
  next.w_over_h = det.box.w / det.box.h;
  return next;
}

BBox state_box(const KalmanState& state) {
  const double area = std::max(state.mean(2), kMinArea);
  const double ratio = std::max(state.w_over_h, 1e-6);
  BBox box;
  box.cx = state.mean(0);
  box.cy = state.mean(1);
  box.w = std::sqrt(area * ratio);
  box.h = std::sqrt(area / ratio);
  return box;
}

}  // namespace cycletrack
