#include "cycletrack/displacement.hpp"

#include <cmath>
#include <stdexcept>

#include "cycletrack/rng.hpp"

namespace cycletrack {

DisplacementSet oracle_displacement(const ScenarioTruth& truth, int frame,
                                    double noise_sigma, std::uint64_t rng_seed) {
  if (frame < 1 || frame > truth.config.duration)
    throw std::out_of_range("frame outside scenario");
  if (truth.corruption.frames.empty())
    throw std::logic_error("corrupt_detections must run before oracle_displacement");

  const auto& log = truth.corruption_at(frame);
  auto rng = seeded_rng(rng_seed, rng_stream::kOracle, static_cast<std::uint64_t>(frame));

  DisplacementSet set;
  set.vectors.resize(log.det_to_track.size());
  for (std::size_t j = 0; j < log.det_to_track.size(); ++j) {
    const std::int64_t id = log.det_to_track[j];
    if (id < 0) continue;  // false positive: no displacement
    const auto it = truth.true_backward.find({frame, id});
    if (it == truth.true_backward.end()) continue;  // entered this frame
    Vec2 v = it->second;
    if (noise_sigma > 0.0) {
      v.x() += noise_sigma * normal_unit(rng);
      v.y() += noise_sigma * normal_unit(rng);
    }
    set.vectors[j] = v;
  }
  return set;
}

namespace {

struct PatchStats {
  double mean = 0.0;
  double var = 0.0;
};

PatchStats patch_stats(const Heatmap& img, int x0, int y0, int w, int h) {
  double sum = 0.0, sumsq = 0.0;
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      const double v = img.at(x, y);
      sum += v;
      sumsq += v * v;
    }
  }
  const double n = static_cast<double>(w) * h;
  PatchStats s;
  s.mean = sum / n;
  s.var = sumsq / n - s.mean * s.mean;
  return s;
}

}  // namespace

std::optional<Vec2> ncc_displacement(const Heatmap& frame_t, const Heatmap& frame_prev,
                                     const Detection& det, int search_radius) {
  if (frame_t.width != frame_prev.width || frame_t.height != frame_prev.height)
    throw std::invalid_argument("frame size mismatch");
  if (search_radius < 0) throw std::invalid_argument("search_radius must be >= 0");

  const int cx = static_cast<int>(std::lround(det.box.cx));
  const int cy = static_cast<int>(std::lround(det.box.cy));
  const int hw = std::max(1, static_cast<int>(std::lround(det.box.w / 2.0)));
  const int hh = std::max(1, static_cast<int>(std::lround(det.box.h / 2.0)));
  const int px = cx - hw, py = cy - hh;
  const int pw = 2 * hw + 1, ph = 2 * hh + 1;
  if (px < 0 || py < 0 || px + pw > frame_t.width || py + ph > frame_t.height)
    throw std::invalid_argument("patch out of bounds");

  const PatchStats tpl = patch_stats(frame_t, px, py, pw, ph);
  if (tpl.var <= 0.0) return std::nullopt;

  double best = -2.0;
  Vec2 best_offset = Vec2::Zero();
  for (int oy = -search_radius; oy <= search_radius; ++oy) {
    for (int ox = -search_radius; ox <= search_radius; ++ox) {
      const int qx = px + ox, qy = py + oy;
      if (qx < 0 || qy < 0 || qx + pw > frame_prev.width || qy + ph > frame_prev.height)
        continue;
      const PatchStats win = patch_stats(frame_prev, qx, qy, pw, ph);
      if (win.var <= 0.0) continue;
      double cross = 0.0;
      for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
          cross += (frame_t.at(px + x, py + y) - tpl.mean) *
                   (frame_prev.at(qx + x, qy + y) - win.mean);
      const double n = static_cast<double>(pw) * ph;
      const double ncc = cross / (n * std::sqrt(tpl.var * win.var));
      if (ncc > best) {
        best = ncc;
        best_offset = Vec2(ox, oy);
      }
    }
  }
  if (best < 0.5) return std::nullopt;
  return best_offset;
}

double displacement_l1(const DisplacementSet& pred, const ScenarioTruth& truth, int frame) {
  if (frame < 1 || frame > truth.config.duration)
    throw std::out_of_range("frame outside scenario");
  const auto& log = truth.corruption_at(frame);
  if (pred.vectors.size() != log.det_to_track.size())
    throw std::invalid_argument("prediction not aligned with frame detections");

  double total = 0.0;
  int matched = 0;
  for (std::size_t j = 0; j < log.det_to_track.size(); ++j) {
    const std::int64_t id = log.det_to_track[j];
    if (id < 0 || !pred.vectors[j]) continue;
    const auto it = truth.true_backward.find({frame, id});
    if (it == truth.true_backward.end()) continue;
    const Vec2 diff = *pred.vectors[j] - it->second;
    total += std::abs(diff.x()) + std::abs(diff.y());
    ++matched;
  }
  if (matched == 0) throw std::runtime_error("no matched cells");
  return total / matched;
}

}  // namespace cycletrack
