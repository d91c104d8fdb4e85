#include "cycletrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "cycletrack/assignment.hpp"

namespace cycletrack {

double iou(const BBox& a, const BBox& b) {
  const double ax1 = a.left(), ay1 = a.top(), ax2 = ax1 + a.w, ay2 = ay1 + a.h;
  const double bx1 = b.left(), by1 = b.top(), bx2 = bx1 + b.w, by2 = by1 + b.h;
  const double iw = std::min(ax2, bx2) - std::max(ax1, bx1);
  const double ih = std::min(ay2, by2) - std::max(ay1, by1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

namespace {

constexpr double kBigCost = 1e6;

struct Box {
  std::int64_t id;
  BBox box;
};

using FrameMap = std::map<int, std::vector<Box>>;

FrameMap index_by_frame(const std::vector<FrameDetections>& data, const char* what) {
  FrameMap map;
  for (const auto& fd : data) {
    for (const auto& det : fd.detections) {
      if (!det.id || *det.id <= 0)
        throw std::invalid_argument(std::string(what) + " boxes must carry positive ids");
      map[fd.frame].push_back({*det.id, det.box});
    }
  }
  return map;
}

}  // namespace

MetricsReport clear_mot(const std::vector<FrameDetections>& gt,
                        const std::vector<FrameDetections>& hyp, double iou_threshold) {
  const FrameMap gt_frames = index_by_frame(gt, "ground-truth");
  const FrameMap hyp_frames = index_by_frame(hyp, "hypothesis");
  if (gt_frames.empty()) throw std::invalid_argument("empty ground truth");

  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : hyp_frames) frames.insert(f);

  MetricsReport report;
  std::unordered_map<std::int64_t, std::int64_t> last_match;   // gt id -> hyp id
  std::unordered_map<std::int64_t, char> was_matched_earlier;  // for fragmentation
  std::unordered_map<std::int64_t, char> in_gap;
  std::unordered_map<std::int64_t, long long> gt_len, gt_covered;

  static const std::vector<Box> kNone;
  for (const int frame : frames) {
    const auto git = gt_frames.find(frame);
    const auto hit = hyp_frames.find(frame);
    const std::vector<Box>& g = git != gt_frames.end() ? git->second : kNone;
    const std::vector<Box>& h = hit != hyp_frames.end() ? hit->second : kNone;

    report.gt_boxes += static_cast<long long>(g.size());
    report.hyp_boxes += static_cast<long long>(h.size());
    for (const auto& box : g) ++gt_len[box.id];

    std::vector<char> g_used(g.size(), 0), h_used(h.size(), 0);
    FrameAssignment log;
    log.frame = frame;

    // Keep correspondences from previous frames while they still overlap.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto prev = last_match.find(g[i].id);
      if (prev == last_match.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h_used[j] || h[j].id != prev->second) continue;
        if (iou(g[i].box, h[j].box) >= iou_threshold) {
          g_used[i] = 1;
          h_used[j] = 1;
          log.matches.emplace_back(g[i].id, h[j].id);
        }
        break;
      }
    }

    // Optimal assignment on what is left, maximizing IoU above threshold.
    std::vector<int> g_rest, h_rest;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g_used[i]) g_rest.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < h.size(); ++j)
      if (!h_used[j]) h_rest.push_back(static_cast<int>(j));
    if (!g_rest.empty() && !h_rest.empty()) {
      CostGrid cost(static_cast<int>(g_rest.size()), static_cast<int>(h_rest.size()));
      for (std::size_t r = 0; r < g_rest.size(); ++r) {
        for (std::size_t c = 0; c < h_rest.size(); ++c) {
          const double v = iou(g[static_cast<std::size_t>(g_rest[r])].box,
                               h[static_cast<std::size_t>(h_rest[c])].box);
          cost(static_cast<int>(r), static_cast<int>(c)) =
              v >= iou_threshold ? 1.0 - v : kBigCost;
        }
      }
      for (const auto& [r, c] : solve_min_cost(cost)) {
        if (cost(r, c) >= kBigCost) continue;
        const Box& gb = g[static_cast<std::size_t>(g_rest[static_cast<std::size_t>(r)])];
        const Box& hb = h[static_cast<std::size_t>(h_rest[static_cast<std::size_t>(c)])];
        g_used[static_cast<std::size_t>(g_rest[static_cast<std::size_t>(r)])] = 1;
        h_used[static_cast<std::size_t>(h_rest[static_cast<std::size_t>(c)])] = 1;
        log.matches.emplace_back(gb.id, hb.id);

        const auto prev = last_match.find(gb.id);
        if (prev != last_match.end() && prev->second != hb.id) ++report.idsw;
      }
    }

    for (const auto& [gid, hid] : log.matches) {
      if (in_gap[gid] && was_matched_earlier[gid]) ++report.frag;
      in_gap[gid] = 0;
      was_matched_earlier[gid] = 1;
      last_match[gid] = hid;
      ++gt_covered[gid];
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g_used[i] && was_matched_earlier[g[i].id]) in_gap[g[i].id] = 1;
    }

    const long long matched = static_cast<long long>(log.matches.size());
    log.misses = static_cast<long long>(g.size()) - matched;
    log.false_positives = static_cast<long long>(h.size()) - matched;
    report.tp += matched;
    report.fn += log.misses;
    report.fp += log.false_positives;
    report.assignment_log.push_back(std::move(log));
  }

  if (report.gt_boxes == 0) throw std::invalid_argument("empty ground truth");

  report.gt_tracks = static_cast<long long>(gt_len.size());
  for (const auto& [id, len] : gt_len) {
    const double coverage = static_cast<double>(gt_covered[id]) / static_cast<double>(len);
    if (coverage >= 0.8) ++report.mt_count;
    if (coverage <= 0.2) ++report.ml_count;
  }

  const double gt_boxes = static_cast<double>(report.gt_boxes);
  report.mota = 100.0 * (1.0 - static_cast<double>(report.fn + report.fp + report.idsw) /
                                   gt_boxes);
  report.prcn = report.tp + report.fp > 0
                    ? 100.0 * report.tp / static_cast<double>(report.tp + report.fp)
                    : 0.0;
  report.rccl = 100.0 * report.tp / gt_boxes;
  report.mt = 100.0 * report.mt_count / static_cast<double>(report.gt_tracks);
  report.ml = 100.0 * report.ml_count / static_cast<double>(report.gt_tracks);
  report.idsw_pct = 100.0 * report.idsw / gt_boxes;
  report.frag_pct = 100.0 * report.frag / gt_boxes;

  const IdScores ids = id_metrics(gt, hyp, iou_threshold);
  report.idp = ids.idp;
  report.idr = ids.idr;
  report.idf1 = ids.idf1;

  std::set<std::int64_t> hyp_ids;
  for (const auto& [frame, boxes] : hyp_frames)
    for (const auto& b : boxes) hyp_ids.insert(b.id);
  report.hyp_tracks = static_cast<long long>(hyp_ids.size());
  return report;
}

IdScores id_metrics(const std::vector<FrameDetections>& gt,
                    const std::vector<FrameDetections>& hyp, double iou_threshold) {
  const FrameMap gt_frames = index_by_frame(gt, "ground-truth");
  const FrameMap hyp_frames = index_by_frame(hyp, "hypothesis");
  if (gt_frames.empty()) throw std::invalid_argument("empty ground truth");

  // Trajectory overlap counts: frames where the pair's boxes meet the IoU bar.
  std::map<std::int64_t, long long> gt_len, hyp_len;
  std::map<std::pair<std::int64_t, std::int64_t>, long long> overlap;
  for (const auto& [frame, gboxes] : gt_frames) {
    for (const auto& gb : gboxes) ++gt_len[gb.id];
    const auto hit = hyp_frames.find(frame);
    if (hit == hyp_frames.end()) continue;
    for (const auto& gb : gboxes)
      for (const auto& hb : hit->second)
        if (iou(gb.box, hb.box) >= iou_threshold) ++overlap[{gb.id, hb.id}];
  }
  for (const auto& [frame, hboxes] : hyp_frames)
    for (const auto& hb : hboxes) ++hyp_len[hb.id];

  long long gt_boxes = 0, hyp_boxes = 0;
  for (const auto& [id, len] : gt_len) gt_boxes += len;
  for (const auto& [id, len] : hyp_len) hyp_boxes += len;

  IdScores scores;
  if (hyp_boxes == 0) {
    scores.idfn = gt_boxes;
    return scores;  // idp = idr = idf1 = 0 by the degenerate convention
  }

  std::vector<std::int64_t> gt_ids, hyp_ids;
  for (const auto& [id, len] : gt_len) gt_ids.push_back(id);
  for (const auto& [id, len] : hyp_len) hyp_ids.push_back(id);

  // Square grid with dummy rows/columns so every trajectory may stay
  // unmatched; cost is the per-frame binary mismatch of the pairing.
  const int n = static_cast<int>(gt_ids.size());
  const int m = static_cast<int>(hyp_ids.size());
  const int dim = n + m;
  CostGrid cost(dim, dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (i < n && j < m) {
        const auto it = overlap.find({gt_ids[static_cast<std::size_t>(i)],
                                      hyp_ids[static_cast<std::size_t>(j)]});
        const long long both = it != overlap.end() ? it->second : 0;
        cost(i, j) = static_cast<double>(gt_len[gt_ids[static_cast<std::size_t>(i)]] +
                                         hyp_len[hyp_ids[static_cast<std::size_t>(j)]] -
                                         2 * both);
      } else if (i < n && j >= m) {
        cost(i, j) = static_cast<double>(gt_len[gt_ids[static_cast<std::size_t>(i)]]);
      } else if (i >= n && j < m) {
        cost(i, j) = static_cast<double>(hyp_len[hyp_ids[static_cast<std::size_t>(j)]]);
      }
    }
  }

  long long idtp = 0;
  for (const auto& [r, c] : solve_min_cost(cost)) {
    if (r >= n || c >= m) continue;
    const auto it = overlap.find(
        {gt_ids[static_cast<std::size_t>(r)], hyp_ids[static_cast<std::size_t>(c)]});
    if (it != overlap.end()) idtp += it->second;
  }

  scores.idtp = idtp;
  scores.idfp = hyp_boxes - idtp;
  scores.idfn = gt_boxes - idtp;
  scores.idp = 100.0 * idtp / static_cast<double>(hyp_boxes);
  scores.idr = 100.0 * idtp / static_cast<double>(gt_boxes);
  scores.idf1 = 200.0 * idtp / static_cast<double>(gt_boxes + hyp_boxes);
  return scores;
}

std::vector<std::pair<int, double>> counting_error_curve(
    const std::vector<long long>& gt_counts, const std::vector<long long>& hyp_counts,
    int window) {
  if (gt_counts.size() != hyp_counts.size())
    throw std::invalid_argument("count series must have equal length");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<std::pair<int, double>> curve;
  for (std::size_t i = static_cast<std::size_t>(window) - 1; i < gt_counts.size();
       i += static_cast<std::size_t>(window)) {
    const long long y = gt_counts[i];
    if (y == 0) continue;
    const double err = 100.0 * std::abs(static_cast<double>(hyp_counts[i] - y)) /
                       static_cast<double>(y);
    curve.emplace_back(static_cast<int>(i + 1), err);
  }
  return curve;
}

Correlation count_correlation(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("need at least 3 pairs");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pairs) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("zero variance in X");
  Correlation c;
  c.slope = sxy / sxx;
  c.intercept = my - c.slope * mx;
  c.gamma = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return c;
}

std::vector<double> lowpass(const std::vector<double>& series, double fps,
                            double cutoff_hz) {
  if (cutoff_hz <= 0.0 || cutoff_hz >= fps / 2.0)
    throw std::invalid_argument("cutoff must be in (0, fps/2)");
  const int window = std::max(1, static_cast<int>(std::llround(fps / (2.0 * cutoff_hz))));
  if (window <= 1 || series.empty()) return series;

  auto causal_ma = [window](const std::vector<double>& x) {
    // Left edge replicated so the output keeps the input length.
    std::vector<double> y(x.size());
    double acc = x.front() * window;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += x[i];
      acc -= i >= static_cast<std::size_t>(window) ? x[i - static_cast<std::size_t>(window)]
                                                   : x.front();
      y[i] = acc / window;
    }
    return y;
  };

  std::vector<double> forward = causal_ma(series);
  std::reverse(forward.begin(), forward.end());
  std::vector<double> backward = causal_ma(forward);
  std::reverse(backward.begin(), backward.end());
  return backward;
}

double dominant_frequency(const std::vector<double>& series, double fps, double band_lo,
                          double band_hi) {
  if (band_lo <= 0.0 || band_hi <= band_lo)
    throw std::invalid_argument("invalid frequency band");
  if (band_hi > fps / 2.0) throw std::invalid_argument("band exceeds Nyquist");
  const std::size_t n = series.size();
  if (static_cast<double>(n) < 4.0 * fps / band_lo)
    throw std::invalid_argument("series too short");

  double mean = 0.0;
  for (const double v : series) mean += v;
  mean /= static_cast<double>(n);

  // Hann window keeps the parabolic peak refinement accurate off-bin.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                              static_cast<double>(n - 1)));
    x[i] = (series[i] - mean) * w;
  }

  const double bin_hz = fps / static_cast<double>(n);
  const int k_lo = std::max(1, static_cast<int>(std::floor(band_lo / bin_hz)));
  const int k_hi = std::min(static_cast<int>(n / 2),
                            static_cast<int>(std::ceil(band_hi / bin_hz)));
  if (k_hi < k_lo) throw std::invalid_argument("band narrower than one bin");

  auto magnitude = [&](int k) {
    std::complex<double> acc(0.0, 0.0);
    const double step = -2.0 * std::numbers::pi * static_cast<double>(k) /
                        static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::polar(1.0, step * static_cast<double>(i));
    return std::abs(acc);
  };

  std::vector<double> mags(static_cast<std::size_t>(k_hi - k_lo + 3));
  for (int k = k_lo - 1; k <= k_hi + 1; ++k)
    mags[static_cast<std::size_t>(k - k_lo + 1)] = magnitude(k);

  int best = k_lo;
  double best_mag = -1.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double m = mags[static_cast<std::size_t>(k - k_lo + 1)];
    const double freq = k * bin_hz;
    if (freq >= band_lo && freq <= band_hi && m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  if (best_mag <= 0.0) throw std::runtime_error("no spectral peak in band");

  const double m0 = mags[static_cast<std::size_t>(best - k_lo)];
  const double m1 = mags[static_cast<std::size_t>(best - k_lo + 1)];
  const double m2 = mags[static_cast<std::size_t>(best - k_lo + 2)];
  double delta = 0.0;
  if (m0 > 0.0 && m2 > 0.0) {
    const double a = std::log(m0), b = std::log(m1), c = std::log(m2);
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  return (static_cast<double>(best) + delta) * bin_hz;
}

std::vector<long long> cumulative_id_counts(const std::vector<FrameDetections>& data,
                                            int frames) {
  std::map<std::int64_t, int> first_frame;
  for (const auto& fd : data) {
    for (const auto& det : fd.detections) {
      if (!det.id) throw std::invalid_argument("boxes must carry ids for counting");
      auto [it, inserted] = first_frame.emplace(*det.id, fd.frame);
      if (!inserted && fd.frame < it->second) it->second = fd.frame;
    }
  }
  std::vector<long long> counts(static_cast<std::size_t>(frames), 0);
  for (const auto& [id, frame] : first_frame)
    if (frame >= 1 && frame <= frames) ++counts[static_cast<std::size_t>(frame - 1)];
  long long running = 0;
  for (auto& c : counts) {
    running += c;
    c = running;
  }
  return counts;
}

}  // namespace cycletrack
