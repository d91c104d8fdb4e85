#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cycletrack/association.hpp"
#include "cycletrack/displacement.hpp"
#include "cycletrack/kalman.hpp"
#include "cycletrack/mot_io.hpp"
#include "cycletrack/types.hpp"

namespace cycletrack {

/// Supplies backward displacements (current -> previous) for the detections
/// of a frame, aligned with the frame's full detection list.
class BackwardSource {
public:
  virtual ~BackwardSource() = default;
  virtual DisplacementSet displacements(int frame,
                                        const std::vector<Detection>& dets) = 0;
};

/// Ground-truth vectors plus Gaussian noise (simulator scenarios).
class OracleBackwardSource final : public BackwardSource {
public:
  OracleBackwardSource(const ScenarioTruth& truth, double noise_sigma, std::uint64_t seed)
      : truth_(&truth), noise_sigma_(noise_sigma), seed_(seed) {}
  DisplacementSet displacements(int frame, const std::vector<Detection>& dets) override;

private:
  const ScenarioTruth* truth_;
  double noise_sigma_;
  std::uint64_t seed_;
};

/// Patch correlation against the previous rendered frame. Produces absent
/// entries when the patch leaves the frame or correlation is too weak.
class NccBackwardSource final : public BackwardSource {
public:
  NccBackwardSource(const std::vector<Heatmap>& frames, int search_radius)
      : frames_(&frames), search_radius_(search_radius) {}
  DisplacementSet displacements(int frame, const std::vector<Detection>& dets) override;

private:
  const std::vector<Heatmap>* frames_;
  int search_radius_;
};

/// Vectors read from a sidecar CSV keyed by (frame, detection index).
class SidecarBackwardSource final : public BackwardSource {
public:
  explicit SidecarBackwardSource(DisplacementSidecar sidecar)
      : sidecar_(std::move(sidecar)) {}
  DisplacementSet displacements(int frame, const std::vector<Detection>& dets) override;

private:
  DisplacementSidecar sidecar_;
};

/// All entries absent; the backward branch then never wins a match
/// (sort_only ablations).
class NullBackwardSource final : public BackwardSource {
public:
  DisplacementSet displacements(int frame, const std::vector<Detection>& dets) override;
};

struct TrackerOutput {
  std::vector<MatchPlan> plans;      // one per frame 2..T
  std::vector<Tracklet> tracklets;   // every tracklet created, in creation order
  int frames = 0;
  std::int64_t count = 0;            // tracklets with hits >= config.min_hits
  std::vector<double> velocity_trace;  // mean matched displacement, frames 2..T
};

/// Online tracker over a frame sequence: per frame it gates detections,
/// corrects backward vectors with the running base vector, predicts each
/// live tracklet forward, fuses both cost matrices, matches greedily under
/// the adaptive gate, and maintains tracklet lifecycle.
class Tracker {
public:
  explicit Tracker(TrackerConfig config, KalmanNoise noise = {});

  /// Frame 1: one tracklet per gated detection, base vector absent.
  void init_first_frame(const std::vector<Detection>& dets);

  /// Frames t >= 2, strictly increasing.
  MatchPlan step(int frame, const std::vector<Detection>& dets, BackwardSource& source);

  TrackerOutput finish() &&;

  std::int64_t live_count() const { return static_cast<std::int64_t>(live_.size()); }

  /// Runs init + step over a full sequence (frames may be sparse; missing
  /// indices are treated as empty).
  static TrackerOutput run(const std::vector<FrameDetections>& frames,
                           BackwardSource& source, const TrackerConfig& config,
                           const KalmanNoise& noise = {});

private:
  std::int64_t spawn(int frame, const Detection& det);

  TrackerConfig config_;
  KalmanNoise noise_;
  std::vector<Tracklet> registry_;
  std::vector<std::size_t> live_;  // indices into registry_, creation order
  BaseVector base_;
  std::int64_t next_id_ = 1;
  int last_frame_ = 0;
  std::vector<MatchPlan> plans_;
  std::vector<double> velocity_trace_;
};

/// Tracker settings used with the S1 benchmark suite: the detector-noise
/// levels there need two frames of coasting for stable counting.
TrackerConfig s1_tracker_config(FusionMode mode = FusionMode::kCycle);

/// Filter noise for the S1 suite. Pulsatile serpentine motion needs a far
/// more responsive filter than the stock constant-velocity defaults.
KalmanNoise s1_kalman_noise();

/// Tracklets with at least min_hits associated detections.
std::int64_t cell_count(const TrackerOutput& output, int min_hits);

/// Cumulative confirmed-tracklet count by spawn frame, length = frames.
std::vector<long long> hyp_counts_by_frame(const TrackerOutput& output, int min_hits,
                                           int frames);

/// Confirmed tracklets only (for hypothesis files).
std::vector<Tracklet> confirmed_tracklets(const TrackerOutput& output, int min_hits);

}  // namespace cycletrack
