#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cycletrack/heatmap.hpp"
#include "cycletrack/mot_io.hpp"
#include "cycletrack/types.hpp"

namespace cycletrack {

// Synthetic single-file capillary flow: cells enter at the path origin,
// advance along the arclength-parameterized centerline with a pulsatile
// speed, and exit at the far end. Corruption turns the exact ground truth
// into a detector-like stream (drops, jitter, false positives).

struct PathSpec {
  enum class Kind { kSinusoid, kPolyline };
  Kind kind = Kind::kSinusoid;

  // Sinusoid: x in [x0, x1], y = cy + amplitude * sin(2*pi*(x - x0) / wavelength).
  double x0 = 16.0;
  double x1 = 496.0;
  double cy = 256.0;
  double amplitude = 60.0;
  double wavelength = 256.0;

  // Polyline vertices, used when kind == kPolyline.
  std::vector<Vec2> points;
};

struct ScenarioConfig {
  double fps = 160.0;
  int duration = 1000;  // frames
  PathSpec path;
  int frame_width = 512;
  int frame_height = 512;
  double base_speed = 4.0;       // px/frame along the path
  double pulse_amplitude = 0.5;  // fraction of base_speed
  double pulse_freq = 1.0;       // Hz
  double spawn_spacing = 25.0;   // px of arclength between consecutive cells
  double cell_width = 12.0;      // px, mean
  double cell_height = 12.0;     // px, mean
  double cell_size_jitter = 1.0; // px, per-cell sigma
  double det_jitter = 0.0;       // px, detection center noise
  double lambda_fp = 0.0;        // expected false positives per true detection
  double lambda_fn = 0.0;        // per-detection drop probability
  double disp_noise_sigma = 0.0; // sidecar displacement noise
  double render_noise_sigma = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TruthRecord {
  int frame = 0;
  std::int64_t id = 0;
  BBox box;
};

/// Per-frame record of what corruption did to the true detections.
struct FrameCorruption {
  std::vector<std::int64_t> dropped_ids;   // true cells present but not emitted
  std::vector<std::int64_t> det_to_track;  // per emitted detection: track id, -1 for FP
};

struct CorruptionLog {
  std::vector<FrameCorruption> frames;  // index t-1
  std::int64_t true_total = 0;
  std::int64_t dropped_total = 0;
  std::int64_t injected_total = 0;
};

struct ScenarioTruth {
  ScenarioConfig config;
  std::vector<TruthRecord> records;  // sorted by (frame, id)
  std::vector<double> speed_series;  // v(t), index t-1
  // Backward vector center(t-1) - center(t), keyed by (frame t, id).
  std::map<std::pair<int, std::int64_t>, Vec2> true_backward;
  std::int64_t track_count = 0;

  // Filled by corrupt_detections.
  std::vector<FrameDetections> detections;
  CorruptionLog corruption;

  const FrameCorruption& corruption_at(int frame) const;
  std::vector<long long> gt_counts_by_frame() const;  // cumulative entries
};

/// Deterministic ground truth for a config; throws if the path is shorter
/// than one cell.
ScenarioTruth generate_scenario(const ScenarioConfig& config);

/// Boustrophedon channel: `lanes` horizontal passes between x0 and x1,
/// joined by semicircular turns of diameter lane_gap. Flow direction
/// alternates lane to lane, packing the field like a crowded capillary.
PathSpec serpentine_path(double x0, double x1, double y0, double lane_gap, int lanes);

/// Standard noisy benchmark scenario ("S1"): 1000 frames at 160 Hz of
/// pulsatile serpentine flow, 25 px spacing, 1 px detection jitter, 5% drops,
/// 2% false positives, 2 px displacement noise. Seeds 0..9 form the suite.
ScenarioConfig s1_scenario(std::uint64_t seed);

/// Two-lane overlap-stress variant: opposing flows 10 px apart, so boxes
/// brush and detections interleave.
ScenarioConfig s2_scenario(std::uint64_t seed);

/// Fills truth.detections and truth.corruption from truth.config: drops each
/// true detection with probability lambda_fn, jitters centers, injects
/// Poisson(lambda_fp * true count) false positives per frame. Deterministic
/// per seed; returns the detection stream.
const std::vector<FrameDetections>& corrupt_detections(ScenarioTruth& truth);

/// One rendered frame: max-of-Gaussians over live cells plus pixel noise.
Heatmap render_frame(const ScenarioTruth& truth, int frame);
std::vector<Heatmap> render_frames(const ScenarioTruth& truth);

/// Sidecar displacements for truth.detections: true backward vectors plus
/// Gaussian noise; false positives get no entry.
DisplacementSidecar make_displacement_sidecar(const ScenarioTruth& truth, double noise_sigma,
                                              std::uint64_t seed);

/// Ground-truth records as per-frame MOT detections (id set, conf 1).
std::vector<FrameDetections> truth_as_detections(const ScenarioTruth& truth);

}  // namespace cycletrack
