#include "cycletrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cycletrack/rng.hpp"

namespace cycletrack {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Arclength-parameterized polyline lookup built from a dense sampling.
class ArcPath {
public:
  explicit ArcPath(const PathSpec& spec) {
    std::vector<Vec2> pts;
    if (spec.kind == PathSpec::Kind::kPolyline) {
      pts = spec.points;
    } else {
      if (spec.x1 <= spec.x0) throw std::invalid_argument("path x1 must exceed x0");
      if (spec.wavelength <= 0.0) throw std::invalid_argument("wavelength must be > 0");
      const int samples = std::max(2, static_cast<int>((spec.x1 - spec.x0) * 4.0));
      pts.reserve(samples + 1);
      for (int i = 0; i <= samples; ++i) {
        const double x = spec.x0 + (spec.x1 - spec.x0) * i / samples;
        const double y =
            spec.cy + spec.amplitude * std::sin(kTwoPi * (x - spec.x0) / spec.wavelength);
        pts.emplace_back(x, y);
      }
    }
    if (pts.size() < 2) throw std::invalid_argument("path needs at least 2 points");

    points_ = std::move(pts);
    cumlen_.resize(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i)
      cumlen_[i] = cumlen_[i - 1] + (points_[i] - points_[i - 1]).norm();
    if (cumlen_.back() <= 0.0) throw std::invalid_argument("degenerate path");
  }

  double length() const { return cumlen_.back(); }

  Vec2 at(double arclen) const {
    arclen = std::clamp(arclen, 0.0, length());
    auto it = std::lower_bound(cumlen_.begin(), cumlen_.end(), arclen);
    std::size_t hi = static_cast<std::size_t>(it - cumlen_.begin());
    if (hi == 0) return points_.front();
    std::size_t lo = hi - 1;
    const double seg = cumlen_[hi] - cumlen_[lo];
    const double t = seg > 0.0 ? (arclen - cumlen_[lo]) / seg : 0.0;
    return points_[lo] + t * (points_[hi] - points_[lo]);
  }

private:
  std::vector<Vec2> points_;
  std::vector<double> cumlen_;
};

}  // namespace

void ScenarioConfig::validate() const {
  if (fps <= 0.0) throw std::invalid_argument("fps must be > 0");
  if (duration < 1) throw std::invalid_argument("empty scenario");
  if (base_speed <= 0.0) throw std::invalid_argument("base_speed must be > 0");
  if (pulse_amplitude < 0.0 || pulse_amplitude >= 1.0)
    throw std::invalid_argument("pulse_amplitude must be in [0,1)");
  if (lambda_fn < 0.0 || lambda_fn > 1.0)
    throw std::invalid_argument("lambda_fn must be in [0,1]");
  if (lambda_fp < 0.0) throw std::invalid_argument("lambda_fp must be >= 0");
  if (spawn_spacing <= 0.0) throw std::invalid_argument("spawn_spacing must be > 0");
  if (cell_width <= 0.0 || cell_height <= 0.0)
    throw std::invalid_argument("cell size must be > 0");
  if (frame_width <= 0 || frame_height <= 0)
    throw std::invalid_argument("frame size must be > 0");
}

const FrameCorruption& ScenarioTruth::corruption_at(int frame) const {
  if (frame < 1 || frame > static_cast<int>(corruption.frames.size()))
    throw std::out_of_range("frame outside corrupted range");
  return corruption.frames[static_cast<std::size_t>(frame - 1)];
}

std::vector<long long> ScenarioTruth::gt_counts_by_frame() const {
  std::vector<long long> counts(static_cast<std::size_t>(config.duration), 0);
  std::map<std::int64_t, int> first_frame;
  for (const auto& rec : records) {
    auto [it, inserted] = first_frame.emplace(rec.id, rec.frame);
    if (!inserted && rec.frame < it->second) it->second = rec.frame;
  }
  for (const auto& [id, frame] : first_frame)
    if (frame >= 1 && frame <= config.duration) ++counts[static_cast<std::size_t>(frame - 1)];
  long long running = 0;
  for (auto& c : counts) {
    running += c;
    c = running;
  }
  return counts;
}

ScenarioTruth generate_scenario(const ScenarioConfig& config) {
  config.validate();
  const ArcPath path(config.path);
  if (path.length() < std::max(config.cell_width, config.cell_height))
    throw std::invalid_argument("path shorter than one cell");

  ScenarioTruth truth;
  truth.config = config;
  truth.speed_series.resize(static_cast<std::size_t>(config.duration));

  // Cumulative flow: cell i sits at arclength C(t) - i * spacing.
  std::vector<double> cumflow(static_cast<std::size_t>(config.duration) + 1, 0.0);
  for (int t = 1; t <= config.duration; ++t) {
    const double v = config.base_speed *
                     (1.0 + config.pulse_amplitude *
                                std::sin(kTwoPi * config.pulse_freq * t / config.fps));
    truth.speed_series[static_cast<std::size_t>(t - 1)] = v;
    cumflow[static_cast<std::size_t>(t)] = cumflow[static_cast<std::size_t>(t - 1)] + v;
  }

  const std::int64_t max_cells =
      static_cast<std::int64_t>(cumflow.back() / config.spawn_spacing) + 1;

  auto rng = seeded_rng(config.seed, rng_stream::kGeometry);

  std::map<std::pair<int, std::int64_t>, Vec2> centers;
  for (std::int64_t i = 0; i < max_cells; ++i) {
    double w = config.cell_width;
    double h = config.cell_height;
    if (config.cell_size_jitter > 0.0) {
      w = std::max(2.0, w + config.cell_size_jitter * normal_unit(rng));
      h = std::max(2.0, h + config.cell_size_jitter * normal_unit(rng));
    }
    const std::int64_t id = i + 1;
    bool seen = false;
    for (int t = 1; t <= config.duration; ++t) {
      const double pos = cumflow[static_cast<std::size_t>(t)] -
                         static_cast<double>(i) * config.spawn_spacing;
      if (pos < 0.0) continue;
      if (pos > path.length()) break;
      const Vec2 c = path.at(pos);
      truth.records.push_back({t, id, BBox{c.x(), c.y(), w, h}});
      centers[{t, id}] = c;
      seen = true;
    }
    if (seen) ++truth.track_count;
  }

  std::sort(truth.records.begin(), truth.records.end(),
            [](const TruthRecord& a, const TruthRecord& b) {
              return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
            });

  for (const auto& [key, center] : centers) {
    const auto prev = centers.find({key.first - 1, key.second});
    if (prev != centers.end())
      truth.true_backward[key] = prev->second - center;
  }
  return truth;
}

PathSpec serpentine_path(double x0, double x1, double y0, double lane_gap, int lanes) {
  if (lanes < 1) throw std::invalid_argument("need at least one lane");
  if (x1 <= x0 || lane_gap <= 0.0) throw std::invalid_argument("bad serpentine geometry");
  PathSpec spec;
  spec.kind = PathSpec::Kind::kPolyline;
  const double r = lane_gap / 2.0;
  for (int lane = 0; lane < lanes; ++lane) {
    const double y = y0 + lane * lane_gap;
    const bool rightward = lane % 2 == 0;
    spec.points.emplace_back(rightward ? x0 : x1, y);
    spec.points.emplace_back(rightward ? x1 : x0, y);
    if (lane + 1 == lanes) break;
    const double cx = rightward ? x1 : x0;
    for (int k = 1; k < 16; ++k) {
      const double theta = -std::numbers::pi / 2.0 + k * std::numbers::pi / 16.0;
      const double bulge = rightward ? std::cos(theta) : -std::cos(theta);
      spec.points.emplace_back(cx + r * bulge, y + r + r * std::sin(theta));
    }
  }
  return spec;
}

ScenarioConfig s1_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.fps = 160.0;
  cfg.duration = 1000;
  cfg.frame_width = 512;
  cfg.frame_height = 512;
  cfg.path.kind = PathSpec::Kind::kSinusoid;
  cfg.path.x0 = 24.0;
  cfg.path.x1 = 488.0;
  cfg.path.cy = 256.0;
  cfg.path.amplitude = 60.0;
  cfg.path.wavelength = 110.0;
  cfg.base_speed = 4.0;
  cfg.pulse_amplitude = 0.5;
  cfg.pulse_freq = 1.0;
  cfg.spawn_spacing = 25.0;
  cfg.cell_width = 12.0;
  cfg.cell_height = 12.0;
  cfg.cell_size_jitter = 1.0;
  cfg.det_jitter = 1.0;
  cfg.lambda_fn = 0.05;
  cfg.lambda_fp = 0.02;
  cfg.disp_noise_sigma = 2.0;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig s2_scenario(std::uint64_t seed) {
  ScenarioConfig cfg = s1_scenario(seed);
  cfg.path = serpentine_path(40.0, 472.0, 248.0, 10.0, 2);
  return cfg;
}

const std::vector<FrameDetections>& corrupt_detections(ScenarioTruth& truth) {
  const ScenarioConfig& config = truth.config;
  auto rng = seeded_rng(config.seed, rng_stream::kCorruption);

  truth.detections.assign(static_cast<std::size_t>(config.duration), {});
  truth.corruption = {};
  truth.corruption.frames.assign(static_cast<std::size_t>(config.duration), {});
  for (int t = 1; t <= config.duration; ++t)
    truth.detections[static_cast<std::size_t>(t - 1)].frame = t;

  // Group truth records by frame (records are sorted by frame).
  std::size_t cursor = 0;
  for (int t = 1; t <= config.duration; ++t) {
    auto& out = truth.detections[static_cast<std::size_t>(t - 1)];
    auto& log = truth.corruption.frames[static_cast<std::size_t>(t - 1)];
    std::size_t begin = cursor;
    while (cursor < truth.records.size() && truth.records[cursor].frame == t) ++cursor;

    const std::size_t true_count = cursor - begin;
    truth.corruption.true_total += static_cast<std::int64_t>(true_count);

    for (std::size_t k = begin; k < cursor; ++k) {
      const TruthRecord& rec = truth.records[k];
      if (config.lambda_fn > 0.0 && uniform_unit(rng) < config.lambda_fn) {
        log.dropped_ids.push_back(rec.id);
        ++truth.corruption.dropped_total;
        continue;
      }
      Detection det;
      det.frame = t;
      det.box = rec.box;
      if (config.det_jitter > 0.0) {
        det.box.cx += config.det_jitter * normal_unit(rng);
        det.box.cy += config.det_jitter * normal_unit(rng);
      }
      det.conf = uniform_in(rng, 0.7, 1.0);
      out.detections.push_back(det);
      log.det_to_track.push_back(rec.id);
    }

    if (config.lambda_fp > 0.0 && true_count > 0) {
      const int injected =
          poisson_knuth(rng, config.lambda_fp * static_cast<double>(true_count));
      for (int k = 0; k < injected; ++k) {
        Detection det;
        det.frame = t;
        det.box = BBox{uniform_in(rng, 8.0, config.frame_width - 8.0),
                       uniform_in(rng, 8.0, config.frame_height - 8.0),
                       config.cell_width, config.cell_height};
        det.conf = uniform_in(rng, 0.6, 1.0);
        out.detections.push_back(det);
        log.det_to_track.push_back(-1);
        ++truth.corruption.injected_total;
      }
    }
  }
  return truth.detections;
}

Heatmap render_frame(const ScenarioTruth& truth, int frame) {
  if (frame < 1 || frame > truth.config.duration)
    throw std::out_of_range("frame outside scenario");
  std::vector<RenderPoint> points;
  for (const auto& rec : truth.records) {
    if (rec.frame != frame) continue;
    if (rec.box.cx < 0.0 || rec.box.cx >= truth.config.frame_width || rec.box.cy < 0.0 ||
        rec.box.cy >= truth.config.frame_height)
      continue;
    points.push_back({rec.box.center(), sigma_from_bbox(rec.box.w, rec.box.h)});
  }
  Heatmap map = render_heatmap(points, truth.config.frame_width, truth.config.frame_height);
  if (truth.config.render_noise_sigma > 0.0) {
    auto rng = seeded_rng(truth.config.seed, rng_stream::kRender,
                          static_cast<std::uint64_t>(frame));
    for (auto& v : map.values) v += truth.config.render_noise_sigma * normal_unit(rng);
  }
  return map;
}

std::vector<Heatmap> render_frames(const ScenarioTruth& truth) {
  std::vector<Heatmap> frames;
  frames.reserve(static_cast<std::size_t>(truth.config.duration));
  for (int t = 1; t <= truth.config.duration; ++t) frames.push_back(render_frame(truth, t));
  return frames;
}

DisplacementSidecar make_displacement_sidecar(const ScenarioTruth& truth,
                                              double noise_sigma, std::uint64_t seed) {
  if (truth.detections.empty())
    throw std::logic_error("corrupt_detections must run before sidecar generation");
  DisplacementSidecar sidecar;
  auto rng = seeded_rng(seed, rng_stream::kSidecar);
  for (const auto& fd : truth.detections) {
    const auto& log = truth.corruption_at(fd.frame);
    for (std::size_t j = 0; j < fd.detections.size(); ++j) {
      const std::int64_t id = log.det_to_track[j];
      if (id < 0) continue;
      const auto it = truth.true_backward.find({fd.frame, id});
      if (it == truth.true_backward.end()) continue;
      Vec2 v = it->second;
      if (noise_sigma > 0.0) {
        v.x() += noise_sigma * normal_unit(rng);
        v.y() += noise_sigma * normal_unit(rng);
      }
      sidecar.emplace(std::make_pair(fd.frame, static_cast<int>(j)), v);
    }
  }
  return sidecar;
}

std::vector<FrameDetections> truth_as_detections(const ScenarioTruth& truth) {
  std::vector<FrameDetections> frames(static_cast<std::size_t>(truth.config.duration));
  for (int t = 1; t <= truth.config.duration; ++t)
    frames[static_cast<std::size_t>(t - 1)].frame = t;
  for (const auto& rec : truth.records) {
    Detection det;
    det.frame = rec.frame;
    det.box = rec.box;
    det.conf = 1.0;
    det.id = rec.id;
    frames[static_cast<std::size_t>(rec.frame - 1)].detections.push_back(det);
  }
  return frames;
}

}  // namespace cycletrack
