#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cycletrack/metrics.hpp"
#include "cycletrack/simulator.hpp"
#include "support/oracles.hpp"

using namespace cycletrack;

namespace {

Detection box(int frame, std::int64_t id, double cx, double cy, double w = 10.0,
              double h = 10.0) {
  Detection det;
  det.frame = frame;
  det.id = id;
  det.box = BBox{cx, cy, w, h};
  return det;
}

std::vector<FrameDetections> track_data(const std::vector<Detection>& dets) {
  std::map<int, FrameDetections> frames;
  for (const auto& det : dets) {
    frames[det.frame].frame = det.frame;
    frames[det.frame].detections.push_back(det);
  }
  std::vector<FrameDetections> out;
  for (auto& [f, fd] : frames) out.push_back(std::move(fd));
  return out;
}

}  // namespace

TEST_CASE("iou of identical and disjoint boxes") {
  const BBox a{10, 10, 8, 8};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, BBox{100, 100, 8, 8}) == doctest::Approx(0.0));
  CHECK(iou(BBox{5, 5, 10, 10}, BBox{10, 5, 10, 10}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a perfect hypothesis scores 100 everywhere") {
  const auto gt = track_data({box(1, 1, 10, 10), box(2, 1, 13, 10), box(3, 1, 16, 10),
                              box(1, 2, 50, 50), box(2, 2, 53, 50)});
  const MetricsReport report = clear_mot(gt, gt, 0.5);
  CHECK(report.mota == doctest::Approx(100.0));
  CHECK(report.idf1 == doctest::Approx(100.0));
  CHECK(report.idp == doctest::Approx(100.0));
  CHECK(report.idsw == 0);
  CHECK(report.frag == 0);
  CHECK(report.mt == doctest::Approx(100.0));
  CHECK(report.ml == doctest::Approx(0.0));
  CHECK(report.prcn == doctest::Approx(100.0));
  CHECK(report.rccl == doctest::Approx(100.0));
}

TEST_CASE("missed middle frame with an identity change") {
  const auto gt = track_data({box(1, 1, 10, 10), box(2, 1, 13, 10), box(3, 1, 16, 10)});
  const auto hyp = track_data({box(1, 7, 10, 10), box(3, 8, 16, 10)});
  const MetricsReport report = clear_mot(gt, hyp, 0.5);
  CHECK(report.fn == 1);
  CHECK(report.fp == 0);
  CHECK(report.idsw == 1);
  CHECK(report.frag == 1);
  CHECK(report.mota == doctest::Approx(100.0 * (1.0 - 2.0 / 3.0)));
  CHECK(report.mota == doctest::Approx(33.33).epsilon(1e-3));
}

TEST_CASE("one spurious box costs exactly one MOTA unit") {
  const auto gt = track_data({box(1, 1, 10, 10), box(2, 1, 13, 10), box(3, 1, 16, 10),
                              box(1, 2, 50, 50), box(2, 2, 53, 50)});
  auto hyp_dets = std::vector<Detection>{box(1, 1, 10, 10), box(2, 1, 13, 10),
                                         box(3, 1, 16, 10), box(1, 2, 50, 50),
                                         box(2, 2, 53, 50), box(2, 9, 200, 200)};
  const MetricsReport report = clear_mot(gt, track_data(hyp_dets), 0.5);
  CHECK(report.fp == 1);
  CHECK(report.mota == doctest::Approx(100.0 * (1.0 - 1.0 / 5.0)));
}

TEST_CASE("each isolated false positive subtracts 100/GT from MOTA") {
  std::vector<Detection> gt_dets, hyp_dets;
  for (int f = 1; f <= 10; ++f) {
    gt_dets.push_back(box(f, 1, 10.0 + 3 * f, 10));
    hyp_dets.push_back(box(f, 1, 10.0 + 3 * f, 10));
  }
  const auto gt = track_data(gt_dets);
  for (int k = 1; k <= 4; ++k) {
    hyp_dets.push_back(box(k, 100 + k, 300.0 + 40 * k, 300));
    const MetricsReport report = clear_mot(gt, track_data(hyp_dets), 0.5);
    CHECK(report.mota == doctest::Approx(100.0 - k * 100.0 / 10.0));
  }
}

TEST_CASE("evaluating a scenario's truth against itself is perfect") {
  ScenarioConfig cfg;
  cfg.path.kind = PathSpec::Kind::kPolyline;
  cfg.path.points = {Vec2(10.0, 100.0), Vec2(480.0, 100.0)};
  cfg.duration = 120;
  cfg.spawn_spacing = 35.0;
  cfg.seed = 3;
  const ScenarioTruth truth = generate_scenario(cfg);
  const auto gt = truth_as_detections(truth);
  const MetricsReport report = clear_mot(gt, gt, 0.5);
  CHECK(report.mota == doctest::Approx(100.0));
  CHECK(report.idf1 == doctest::Approx(100.0));
  CHECK(report.idsw == 0);
  CHECK(report.frag == 0);
}

TEST_CASE("empty ground truth is an error") {
  const auto hyp = track_data({box(1, 1, 10, 10)});
  CHECK_THROWS(clear_mot({}, hyp, 0.5));
}

TEST_CASE("mismatched frame ranges evaluate over the union") {
  const auto gt = track_data({box(1, 1, 10, 10), box(2, 1, 13, 10)});
  const auto hyp = track_data({box(2, 5, 13, 10), box(3, 5, 16, 10)});
  const MetricsReport report = clear_mot(gt, hyp, 0.5);
  CHECK(report.fn == 1);  // gt frame 1 unmatched
  CHECK(report.fp == 1);  // hyp frame 3 unmatched
  CHECK(report.tp == 1);
}

TEST_CASE("a split track halves the identity score") {
  const auto gt = track_data(
      {box(1, 1, 10, 10), box(2, 1, 13, 10), box(3, 1, 16, 10), box(4, 1, 19, 10)});
  const auto hyp = track_data(
      {box(1, 7, 10, 10), box(2, 7, 13, 10), box(3, 8, 16, 10), box(4, 8, 19, 10)});

  // Exhaustive matching over trajectories fixes the expected value.
  const std::vector<std::vector<long long>> overlap = {{2, 2}};
  const double expected = oracles::brute_force_idf1(overlap, 4, 4);
  CHECK(expected == doctest::Approx(50.0));

  const IdScores scores = id_metrics(gt, hyp, 0.5);
  CHECK(scores.idf1 == doctest::Approx(expected));
  CHECK(scores.idf1 <= 75.0);
  CHECK(scores.idp == doctest::Approx(50.0));
  CHECK(scores.idr == doctest::Approx(50.0));
}

TEST_CASE("empty hypothesis zeroes identity scores") {
  const auto gt = track_data({box(1, 1, 10, 10), box(2, 1, 13, 10)});
  const IdScores scores = id_metrics(gt, {}, 0.5);
  CHECK(scores.idp == doctest::Approx(0.0));
  CHECK(scores.idr == doctest::Approx(0.0));
  CHECK(scores.idf1 == doctest::Approx(0.0));
}

TEST_CASE("identity matching equals exhaustive enumeration on small instances") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> tracks(1, 4), start(1, 3), len(1, 5), lane(0, 3);
  for (int k = 0; k < 60; ++k) {
    std::vector<Detection> gt_dets, hyp_dets;
    const int n = tracks(rng), m = tracks(rng);
    for (int i = 0; i < n; ++i) {
      const int s = start(rng), l = len(rng), y = 30 * lane(rng);
      for (int f = s; f < s + l; ++f) gt_dets.push_back(box(f, i + 1, 10.0 + 3 * f, y));
    }
    for (int j = 0; j < m; ++j) {
      const int s = start(rng), l = len(rng), y = 30 * lane(rng);
      for (int f = s; f < s + l; ++f) hyp_dets.push_back(box(f, j + 1, 10.0 + 3 * f, y));
    }
    if (gt_dets.empty()) continue;
    const auto gt = track_data(gt_dets);
    const auto hyp = track_data(hyp_dets);

    // Overlap counts per trajectory pair at IoU >= 0.5.
    std::vector<std::vector<long long>> overlap(static_cast<std::size_t>(n),
                                                std::vector<long long>(static_cast<std::size_t>(m), 0));
    for (const auto& g : gt_dets)
      for (const auto& h : hyp_dets)
        if (g.frame == h.frame && iou(g.box, h.box) >= 0.5)
          ++overlap[static_cast<std::size_t>(*g.id - 1)][static_cast<std::size_t>(*h.id - 1)];

    const double expected = hyp_dets.empty()
                                ? 0.0
                                : oracles::brute_force_idf1(
                                      overlap, static_cast<long long>(gt_dets.size()),
                                      static_cast<long long>(hyp_dets.size()));
    const IdScores scores = id_metrics(gt, hyp, 0.5);
    CHECK(scores.idf1 == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("counting error curve basics") {
  std::vector<long long> gt(200), hyp(200);
  for (int i = 0; i < 200; ++i) {
    gt[static_cast<std::size_t>(i)] = i + 1;
    hyp[static_cast<std::size_t>(i)] = i + 1;
  }
  for (const auto& [frame, err] : counting_error_curve(gt, hyp, 50))
    CHECK(err == doctest::Approx(0.0));

  for (int i = 0; i < 200; ++i) {
    gt[static_cast<std::size_t>(i)] = 100;
    hyp[static_cast<std::size_t>(i)] = 105;
  }
  const auto curve = counting_error_curve(gt, hyp, 50);
  REQUIRE(curve.size() == 4);
  for (const auto& [frame, err] : curve) CHECK(err == doctest::Approx(5.0));
  CHECK(curve[0].first == 50);
  CHECK(curve[3].first == 200);
}

TEST_CASE("zero-count checkpoints are skipped") {
  std::vector<long long> gt(100, 0), hyp(100, 3);
  CHECK(counting_error_curve(gt, hyp, 50).empty());
}

TEST_CASE("counting error curve is scale invariant") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> step(0, 2);
  std::vector<long long> gt(300), hyp(300);
  long long a = 1, b = 1;
  for (int i = 0; i < 300; ++i) {
    a += step(rng);
    b += step(rng);
    gt[static_cast<std::size_t>(i)] = a;
    hyp[static_cast<std::size_t>(i)] = b;
  }
  const auto base = counting_error_curve(gt, hyp, 50);
  std::vector<long long> gt3(300), hyp3(300);
  for (int i = 0; i < 300; ++i) {
    gt3[static_cast<std::size_t>(i)] = 3 * gt[static_cast<std::size_t>(i)];
    hyp3[static_cast<std::size_t>(i)] = 3 * hyp[static_cast<std::size_t>(i)];
  }
  const auto scaled = counting_error_curve(gt3, hyp3, 50);
  REQUIRE(base.size() == scaled.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(base[i].second == doctest::Approx(scaled[i].second).epsilon(1e-12));
}

TEST_CASE("correlation of exact agreement and inversion") {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 1; i <= 6; ++i) pairs.emplace_back(10.0 * i, 10.0 * i);
  const Correlation fit = count_correlation(pairs);
  CHECK(fit.slope == doctest::Approx(1.0));
  CHECK(fit.intercept == doctest::Approx(0.0));
  CHECK(fit.gamma == doctest::Approx(1.0));

  for (auto& [x, y] : pairs) y = -x;
  CHECK(count_correlation(pairs).gamma == doctest::Approx(-1.0));

  CHECK_THROWS(count_correlation({{1, 1}, {2, 2}}));
  CHECK_THROWS(count_correlation({{3, 1}, {3, 2}, {3, 5}}));
}

TEST_CASE("lowpass preserves constants") {
  const std::vector<double> series(500, 4.25);
  const auto smoothed = lowpass(series, 160.0, 3.0);
  REQUIRE(smoothed.size() == series.size());
  for (const double v : smoothed) CHECK(v == doctest::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("lowpass attenuation at four times the cutoff matches the closed form") {
  const double fps = 160.0, cutoff = 3.0, f = 4.0 * cutoff;
  const int window = static_cast<int>(std::llround(fps / (2.0 * cutoff)));
  const double expected_gain = std::pow(oracles::moving_average_gain(f, fps, window), 2);
  CHECK(expected_gain < 0.3);

  const int n = 1600;
  std::vector<double> series(n);
  for (int i = 0; i < n; ++i)
    series[static_cast<std::size_t>(i)] =
        std::sin(2.0 * std::numbers::pi * f * i / fps);
  const auto smoothed = lowpass(series, fps, cutoff);
  double amp = 0.0;
  for (int i = n / 4; i < 3 * n / 4; ++i)
    amp = std::max(amp, std::abs(smoothed[static_cast<std::size_t>(i)]));
  CHECK(amp < 0.3);
  CHECK(amp == doctest::Approx(expected_gain).epsilon(0.15));
}

TEST_CASE("lowpass impulse response is symmetric (zero phase)") {
  std::vector<double> series(301, 0.0);
  series[150] = 1.0;
  const auto smoothed = lowpass(series, 160.0, 4.0);
  for (int k = 1; k <= 40; ++k)
    CHECK(smoothed[static_cast<std::size_t>(150 - k)] ==
          doctest::Approx(smoothed[static_cast<std::size_t>(150 + k)]).epsilon(1e-12));
}

TEST_CASE("lowpass rejects cutoffs beyond Nyquist") {
  CHECK_THROWS(lowpass(std::vector<double>(100, 1.0), 160.0, 80.0));
  CHECK_THROWS(lowpass(std::vector<double>(100, 1.0), 160.0, 0.0));
}

TEST_CASE("a one hertz tone is recovered within two centihertz") {
  const double fps = 160.0;
  for (const double f0 : {0.8, 1.0, 1.3}) {
    std::vector<double> series(1000);
    for (int i = 0; i < 1000; ++i)
      series[static_cast<std::size_t>(i)] =
          3.0 + std::sin(2.0 * std::numbers::pi * f0 * i / fps + 0.7);
    const double est = dominant_frequency(series, fps, 0.7, 3.0);
    CHECK(est == doctest::Approx(f0).epsilon(0.02 / f0));
    CHECK(std::abs(est - f0) < 0.02);
  }
}

TEST_CASE("short series are rejected") {
  std::vector<double> series(100, 1.0);
  CHECK_THROWS(dominant_frequency(series, 160.0, 0.5, 3.0));
}

TEST_CASE("white noise lands somewhere in the band without locking in") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> estimates;
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> series(1400);
    for (auto& v : series) v = noise(rng);
    const double est = dominant_frequency(series, 160.0, 0.5, 3.0);
    CHECK(est >= 0.4);
    CHECK(est <= 3.1);
    estimates.push_back(est);
  }
  std::sort(estimates.begin(), estimates.end());
  CHECK(estimates.back() - estimates.front() > 0.1);  // spread, not a fixed lock
}

TEST_CASE("constant series has no spectral peak") {
  std::vector<double> series(1400, 2.0);
  CHECK_THROWS_AS(dominant_frequency(series, 160.0, 0.5, 3.0), std::runtime_error);
}

TEST_CASE("cumulative id counts follow first appearances") {
  const auto data = track_data({box(1, 1, 10, 10), box(2, 1, 13, 10), box(2, 2, 50, 50),
                                box(4, 3, 90, 90)});
  const auto counts = cumulative_id_counts(data, 5);
  CHECK(counts == std::vector<long long>{1, 2, 2, 3, 3});
}
