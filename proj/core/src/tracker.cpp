#include "cycletrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cycletrack {

DisplacementSet OracleBackwardSource::displacements(int frame,
                                                    const std::vector<Detection>& dets) {
  DisplacementSet set = oracle_displacement(*truth_, frame, noise_sigma_, seed_);
  if (set.vectors.size() != dets.size())
    throw std::logic_error("oracle displacement misaligned with detections");
  return set;
}

DisplacementSet NccBackwardSource::displacements(int frame,
                                                 const std::vector<Detection>& dets) {
  DisplacementSet set;
  set.vectors.resize(dets.size());
  if (frame < 2 || frame > static_cast<int>(frames_->size())) return set;
  const Heatmap& cur = (*frames_)[static_cast<std::size_t>(frame - 1)];
  const Heatmap& prev = (*frames_)[static_cast<std::size_t>(frame - 2)];
  for (std::size_t j = 0; j < dets.size(); ++j) {
    try {
      set.vectors[j] = ncc_displacement(cur, prev, dets[j], search_radius_);
    } catch (const std::invalid_argument&) {
      // patch outside the frame: leave absent, association falls back
    }
  }
  return set;
}

DisplacementSet SidecarBackwardSource::displacements(int frame,
                                                     const std::vector<Detection>& dets) {
  DisplacementSet set;
  set.vectors.resize(dets.size());
  for (std::size_t j = 0; j < dets.size(); ++j) {
    const auto it = sidecar_.find({frame, static_cast<int>(j)});
    if (it != sidecar_.end()) set.vectors[j] = it->second;
  }
  return set;
}

DisplacementSet NullBackwardSource::displacements(int /*frame*/,
                                                  const std::vector<Detection>& dets) {
  DisplacementSet set;
  set.vectors.resize(dets.size());
  return set;
}

Tracker::Tracker(TrackerConfig config, KalmanNoise noise)
    : config_(config), noise_(noise) {
  config_.validate();
}

std::int64_t Tracker::spawn(int frame, const Detection& det) {
  Tracklet tr;
  tr.id = next_id_++;
  tr.history.emplace_back(frame, det.box);
  tr.kalman = kf_init(det, noise_);
  tr.hits = 1;
  tr.misses_in_row = 0;
  tr.confirmed = tr.hits >= config_.min_hits;
  registry_.push_back(std::move(tr));
  live_.push_back(registry_.size() - 1);
  return registry_.back().id;
}

void Tracker::init_first_frame(const std::vector<Detection>& dets) {
  if (last_frame_ != 0) throw std::logic_error("tracker already initialized");
  const auto gated = filter_by_confidence(dets, config_.conf_threshold);
  for (const auto& det : gated) spawn(1, det);
  base_ = std::nullopt;
  last_frame_ = 1;
}

MatchPlan Tracker::step(int frame, const std::vector<Detection>& dets,
                        BackwardSource& source) {
  if (last_frame_ == 0) throw std::logic_error("init_first_frame must run first");
  if (frame <= last_frame_)
    throw std::invalid_argument("frame index must be strictly increasing");

  // Backward displacements are produced against the full detection list so
  // sidecar indices stay valid, then gated together with the detections.
  DisplacementSet raw = source.displacements(frame, dets);
  if (raw.vectors.size() != dets.size())
    throw std::logic_error("backward source misaligned with detections");

  std::vector<Detection> gated;
  DisplacementSet backward;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (dets[j].conf < config_.conf_threshold) continue;
    gated.push_back(dets[j]);
    backward.vectors.push_back(raw.vectors[j]);
  }

  if (config_.base_blend_enabled && base_) {
    for (auto& v : backward.vectors)
      if (v) v = correct_with_base(*v, base_);
  }

  // Forward branch: predict every live tracklet to this frame.
  std::vector<Vec2> track_centers, forward;
  track_centers.reserve(live_.size());
  forward.reserve(live_.size());
  for (const std::size_t idx : live_) {
    Tracklet& tr = registry_[idx];
    const Vec2 before = tr.kalman.mean.head<2>();
    // Reference center at t-1: the last observation when the tracklet was
    // matched there, otherwise the filter's coasted estimate.
    const Vec2 reference =
        tr.misses_in_row == 0 ? tr.last_box().center() : before;
    KalmanPrediction pred = kf_predict(tr.kalman, noise_);
    tr.kalman = pred.state;
    track_centers.push_back(reference);
    forward.push_back(pred.state.mean.head<2>() - before);
  }

  std::vector<Vec2> det_centers;
  det_centers.reserve(gated.size());
  for (const auto& det : gated) det_centers.push_back(det.box.center());

  const CostMatrix m_ct = cost_ct(track_centers, det_centers, backward);
  const CostMatrix m_sort = cost_sort(track_centers, det_centers, forward);
  CostMatrix fused;
  switch (config_.fusion_mode) {
    case FusionMode::kCycle: fused = fuse_min(m_ct, m_sort); break;
    case FusionMode::kCtOnly: fused = m_ct; break;
    case FusionMode::kSortOnly: fused = m_sort; break;
  }

  const double gate = adaptive_threshold(gated, config_.fallback_gate);
  MatchPlan plan = greedy_match(fused, gate);

  // Matched tracklets: measurement update and history append.
  std::vector<Vec2> matched_backward;
  matched_backward.reserve(plan.pairs.size());
  double velocity_sum = 0.0;
  for (const auto& pair : plan.pairs) {
    Tracklet& tr = registry_[live_[static_cast<std::size_t>(pair.track)]];
    const Detection& det = gated[static_cast<std::size_t>(pair.det)];

    const auto& [prev_frame, prev_box] = tr.history.back();
    velocity_sum += (det.box.center() - prev_box.center()).norm() /
                    static_cast<double>(frame - prev_frame);
    matched_backward.push_back(track_centers[static_cast<std::size_t>(pair.track)] -
                               det.box.center());

    tr.kalman = kf_update(tr.kalman, det, noise_);
    tr.history.emplace_back(frame, det.box);
    ++tr.hits;
    tr.misses_in_row = 0;
    tr.confirmed = tr.confirmed || tr.hits >= config_.min_hits;
  }

  // Unmatched tracklets age; termination removes them from the live set.
  std::vector<std::size_t> survivors;
  survivors.reserve(live_.size());
  std::vector<char> matched_row(live_.size(), 0);
  for (const auto& pair : plan.pairs) matched_row[static_cast<std::size_t>(pair.track)] = 1;
  for (std::size_t r = 0; r < live_.size(); ++r) {
    Tracklet& tr = registry_[live_[r]];
    if (!matched_row[r]) {
      ++tr.misses_in_row;
      if (tr.misses_in_row > config_.max_age) continue;  // terminated
    }
    survivors.push_back(live_[r]);
  }
  live_ = std::move(survivors);

  // New tracklets join after matching; they are not matchable this frame and
  // do not feed the base vector.
  for (const int j : plan.unmatched_dets)
    spawn(frame, gated[static_cast<std::size_t>(j)]);

  base_ = update_base(plan, matched_backward);

  if (!plan.pairs.empty())
    velocity_trace_.push_back(velocity_sum / static_cast<double>(plan.pairs.size()));
  else
    velocity_trace_.push_back(velocity_trace_.empty() ? 0.0 : velocity_trace_.back());

  plans_.push_back(plan);
  last_frame_ = frame;
  return plan;
}

TrackerOutput Tracker::finish() && {
  TrackerOutput out;
  out.plans = std::move(plans_);
  out.tracklets = std::move(registry_);
  out.frames = last_frame_;
  out.velocity_trace = std::move(velocity_trace_);
  out.count = 0;
  for (const auto& tr : out.tracklets)
    if (tr.hits >= config_.min_hits) ++out.count;
  return out;
}

TrackerOutput Tracker::run(const std::vector<FrameDetections>& frames,
                           BackwardSource& source, const TrackerConfig& config,
                           const KalmanNoise& noise) {
  if (frames.empty()) throw std::invalid_argument("at least one frame required");
  int max_frame = 0;
  for (const auto& fd : frames) max_frame = std::max(max_frame, fd.frame);

  std::vector<const std::vector<Detection>*> by_index(
      static_cast<std::size_t>(max_frame), nullptr);
  for (const auto& fd : frames) {
    if (fd.frame < 1) throw std::invalid_argument("frame index must be >= 1");
    by_index[static_cast<std::size_t>(fd.frame - 1)] = &fd.detections;
  }

  static const std::vector<Detection> kEmpty;
  Tracker tracker(config, noise);
  tracker.init_first_frame(by_index[0] ? *by_index[0] : kEmpty);
  for (int t = 2; t <= max_frame; ++t)
    tracker.step(t, by_index[static_cast<std::size_t>(t - 1)]
                        ? *by_index[static_cast<std::size_t>(t - 1)]
                        : kEmpty,
                 source);
  return std::move(tracker).finish();
}

TrackerConfig s1_tracker_config(FusionMode mode) {
  TrackerConfig cfg;
  // 0.7 is the floor of the simulator's true-detection confidence band;
  // false positives reach down to 0.6.
  cfg.conf_threshold = 0.7;
  cfg.max_age = 4;
  cfg.min_hits = 10;
  cfg.fusion_mode = mode;
  return cfg;
}

KalmanNoise s1_kalman_noise() {
  KalmanNoise noise;
  noise.process_pos = 0.2;
  noise.process_vel = 0.2;
  return noise;
}

std::int64_t cell_count(const TrackerOutput& output, int min_hits) {
  std::int64_t count = 0;
  for (const auto& tr : output.tracklets)
    if (tr.hits >= min_hits) ++count;
  return count;
}

std::vector<long long> hyp_counts_by_frame(const TrackerOutput& output, int min_hits,
                                           int frames) {
  std::vector<long long> counts(static_cast<std::size_t>(frames), 0);
  for (const auto& tr : output.tracklets) {
    if (tr.hits < min_hits) continue;
    const int f = tr.first_frame();
    if (f >= 1 && f <= frames) ++counts[static_cast<std::size_t>(f - 1)];
  }
  long long running = 0;
  for (auto& c : counts) {
    running += c;
    c = running;
  }
  return counts;
}

std::vector<Tracklet> confirmed_tracklets(const TrackerOutput& output, int min_hits) {
  std::vector<Tracklet> kept;
  for (const auto& tr : output.tracklets)
    if (tr.hits >= min_hits) kept.push_back(tr);
  return kept;
}

}  // namespace cycletrack
