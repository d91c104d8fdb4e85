#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>

#include "cycletrack/kalman.hpp"

using namespace cycletrack;

namespace {

Detection make_det(double cx, double cy, double w = 6.0, double h = 6.0) {
  Detection det;
  det.box = BBox{cx, cy, w, h};
  return det;
}

}  // namespace

TEST_CASE("init takes position from the detection with zero velocity") {
  const KalmanState state = kf_init(make_det(13.0, 13.0));
  CHECK(state.mean(0) == doctest::Approx(13.0));
  CHECK(state.mean(1) == doctest::Approx(13.0));
  CHECK(state.mean(2) == doctest::Approx(36.0));
  CHECK(state.mean(3) == 0.0);
  CHECK(state.mean(4) == 0.0);
  CHECK(state.mean(5) == 0.0);

  const KalmanState again = kf_init(make_det(13.0, 13.0));
  CHECK(state.mean == again.mean);
  CHECK(state.covariance == again.covariance);

  CHECK(kf_init(make_det(0, 0, 4.0, 2.0)).w_over_h == doctest::Approx(2.0));
}

TEST_CASE("fresh state predicts zero displacement") {
  const KalmanState state = kf_init(make_det(13.0, 13.0));
  const auto pred = kf_predict(state);
  CHECK(pred.displacement.x() == doctest::Approx(0.0));
  CHECK(pred.displacement.y() == doctest::Approx(0.0));
}

TEST_CASE("prediction is linear in the velocity") {
  KalmanState state = kf_init(make_det(10.0, 20.0));
  state.mean(3) = -3.0;
  state.mean(4) = 0.0;
  const auto pred = kf_predict(state);
  CHECK(pred.box.cx == doctest::Approx(7.0));
  CHECK(pred.box.cy == doctest::Approx(20.0));
  CHECK(pred.displacement.x() == doctest::Approx(-3.0));
}

TEST_CASE("predicting twice without an update advances two frames") {
  KalmanState state = kf_init(make_det(10.0, 20.0));
  state.mean(3) = 2.0;
  auto first = kf_predict(state);
  auto second = kf_predict(first.state);
  CHECK(second.box.cx == doctest::Approx(14.0));
}

TEST_CASE("constant-velocity track converges below 1e-6 by frame 50") {
  const Vec2 v(2.0, 1.0);
  KalmanState state = kf_init(make_det(10.0, 10.0));
  double prev_err = 1e9;
  double err_at_50 = 1e9;
  for (int frame = 2; frame <= 50; ++frame) {
    auto pred = kf_predict(state);
    const double k = static_cast<double>(frame - 1);
    state = kf_update(pred.state, make_det(10.0 + v.x() * k, 10.0 + v.y() * k));
    const double err = (state.mean.segment<2>(3) - v).norm();
    if (frame > 11) CHECK(err <= prev_err);  // monotone after burn-in
    prev_err = err;
    if (frame == 50) err_at_50 = err;
  }
  CHECK(err_at_50 < 1e-6);
  // The next forward displacement equals the converged velocity.
  const auto pred = kf_predict(state);
  CHECK((pred.displacement - v).norm() < 1e-6);
}

TEST_CASE("zero innovation leaves the position unchanged") {
  KalmanState state = kf_init(make_det(10.0, 10.0));
  auto pred = kf_predict(state);
  const Detection det = make_det(pred.state.mean(0), pred.state.mean(1));
  const KalmanState updated = kf_update(pred.state, det);
  CHECK(updated.mean(0) == doctest::Approx(pred.state.mean(0)));
  CHECK(updated.mean(1) == doctest::Approx(pred.state.mean(1)));
}

TEST_CASE("vanishing measurement noise pulls the posterior onto the measurement") {
  KalmanNoise noise;
  noise.meas_sigma = 1e-6;
  KalmanState state = kf_init(make_det(10.0, 10.0), noise);
  auto pred = kf_predict(state, noise);
  const KalmanState updated = kf_update(pred.state, make_det(14.0, 11.0), noise);
  CHECK(updated.mean(0) == doctest::Approx(14.0).epsilon(1e-9));
  CHECK(updated.mean(1) == doctest::Approx(11.0).epsilon(1e-9));
}

TEST_CASE("updates strictly shrink the covariance trace") {
  KalmanState state = kf_init(make_det(10.0, 10.0));
  for (int i = 0; i < 5; ++i) {
    auto pred = kf_predict(state);
    const double before = pred.state.covariance.trace();
    state = kf_update(pred.state, make_det(10.0 + i, 10.0));
    CHECK(state.covariance.trace() < before);
  }
}

TEST_CASE("prediction is translation equivariant") {
  KalmanState state = kf_init(make_det(10.0, 20.0));
  state.mean(3) = 1.5;
  state.mean(4) = -0.5;

  KalmanState shifted = state;
  shifted.mean(0) += 100.0;
  shifted.mean(1) += 50.0;

  const auto a = kf_predict(state);
  const auto b = kf_predict(shifted);
  CHECK(b.state.mean(0) == doctest::Approx(a.state.mean(0) + 100.0));
  CHECK(b.state.mean(1) == doctest::Approx(a.state.mean(1) + 50.0));
  CHECK(b.displacement.x() == doctest::Approx(a.displacement.x()));
  CHECK(b.displacement.y() == doctest::Approx(a.displacement.y()));
}

TEST_CASE("covariance stays symmetric positive-definite over 10000 cycles") {
  KalmanState state = kf_init(make_det(100.0, 100.0));
  for (int i = 1; i <= 10000; ++i) {
    auto pred = kf_predict(state);
    state = kf_update(pred.state, make_det(100.0 + 0.37 * i, 100.0 - 0.11 * i));
    if (i % 500 == 0 || i < 10) {
      CHECK((state.covariance - state.covariance.transpose()).norm() < 1e-9);
      Eigen::LLT<Mat6> llt(state.covariance);
      CHECK(llt.info() == Eigen::Success);
      CHECK(state.covariance.diagonal().minCoeff() > 0.0);
    }
  }
}
