#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "cycletrack/association.hpp"
#include "cycletrack/displacement.hpp"
#include "cycletrack/metrics.hpp"
#include "cycletrack/simulator.hpp"
#include "cycletrack/tracker.hpp"

using namespace cycletrack;

namespace {

// Steady flow with a fixed number of concurrent cells and exact sidecar
// displacements; measures association + lifecycle per frame.
std::vector<FrameDetections> make_stream(int frames, int cells) {
  std::vector<FrameDetections> stream(static_cast<std::size_t>(frames));
  for (int t = 1; t <= frames; ++t) {
    auto& fd = stream[static_cast<std::size_t>(t - 1)];
    fd.frame = t;
    for (int c = 0; c < cells; ++c) {
      Detection det;
      det.box = BBox{std::fmod(40.0 * c + 4.0 * t, 4000.0), 100.0 + 15.0 * (c % 4), 12.0,
                     12.0};
      det.conf = 0.9;
      fd.detections.push_back(det);
    }
  }
  return stream;
}

DisplacementSidecar make_sidecar(int frames, int cells) {
  DisplacementSidecar sidecar;
  for (int t = 2; t <= frames; ++t)
    for (int c = 0; c < cells; ++c)
      sidecar.emplace(std::make_pair(t, c), Vec2(-4.0, 0.0));
  return sidecar;
}

}  // namespace

static void BM_TrackerStep(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const int frames = 512;
  const auto stream = make_stream(frames, cells);
  SidecarBackwardSource source(make_sidecar(frames, cells));
  const TrackerConfig config = s1_tracker_config();
  for (auto _ : state) {
    TrackerOutput out = Tracker::run(stream, source, config, s1_kalman_noise());
    benchmark::DoNotOptimize(out.count);
  }
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_TrackerStep)->Arg(10)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_GreedyMatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CostMatrix m = CostMatrix::filled(n, n, 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> cost(0.0, 30.0);
  for (auto& v : m.data) v = cost(rng);
  for (auto _ : state) {
    MatchPlan plan = greedy_match(m, 20.0);
    benchmark::DoNotOptimize(plan.pairs.size());
  }
}
BENCHMARK(BM_GreedyMatch)->Arg(20)->Arg(50)->Arg(200);

static void BM_ClearMot(benchmark::State& state) {
  ScenarioConfig cfg = s1_scenario(0);
  cfg.duration = 200;
  ScenarioTruth truth = generate_scenario(cfg);
  corrupt_detections(truth);
  OracleBackwardSource source(truth, cfg.disp_noise_sigma, 0);
  TrackerOutput out = Tracker::run(truth.detections, source, s1_tracker_config(),
                                   s1_kalman_noise());
  const auto gt = truth_as_detections(truth);
  const auto hyp = parse_mot_from_string(
      write_mot_to_string(confirmed_tracklets(out, s1_tracker_config().min_hits)));
  for (auto _ : state) {
    MetricsReport report = clear_mot(gt, hyp, 0.5);
    benchmark::DoNotOptimize(report.mota);
  }
  state.SetItemsProcessed(state.iterations() * cfg.duration);
}
BENCHMARK(BM_ClearMot)->Unit(benchmark::kMillisecond);

static void BM_RenderHeatmap(benchmark::State& state) {
  std::vector<RenderPoint> points;
  for (int i = 0; i < 30; ++i)
    points.push_back({Vec2(20.0 + 15.0 * i, 256.0), 4.0});
  for (auto _ : state) {
    Heatmap map = render_heatmap(points, 512, 512);
    benchmark::DoNotOptimize(map.values.data());
  }
}
BENCHMARK(BM_RenderHeatmap)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
