#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cycletrack/mot_io.hpp"
#include "cycletrack/types.hpp"

namespace cycletrack {

double iou(const BBox& a, const BBox& b);

struct FrameAssignment {
  int frame = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> matches;  // (gt id, hyp id)
  long long misses = 0;
  long long false_positives = 0;
};

/// All Table-style tracking metrics plus raw event counts. Percentages are
/// in [0, 100]; idsw/frag are reported both raw and per GT box * 100.
struct MetricsReport {
  double prcn = 0.0;
  double rccl = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  double idf1 = 0.0;
  double mt = 0.0;
  double ml = 0.0;
  long long idsw = 0;
  long long frag = 0;
  double idsw_pct = 0.0;
  double frag_pct = 0.0;
  double mota = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long gt_boxes = 0;
  long long hyp_boxes = 0;
  long long gt_tracks = 0;
  long long hyp_tracks = 0;
  long long mt_count = 0;
  long long ml_count = 0;
  std::vector<FrameAssignment> assignment_log;
};

/// CLEAR-MOT events over per-frame box matching at IoU >= threshold.
/// Correspondences carry over between frames while still valid; the rest are
/// matched by exact optimal assignment maximizing IoU. Empty GT is an error.
MetricsReport clear_mot(const std::vector<FrameDetections>& gt,
                        const std::vector<FrameDetections>& hyp,
                        double iou_threshold = 0.5);

struct IdScores {
  double idp = 0.0;
  double idr = 0.0;
  double idf1 = 0.0;
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
};

/// Identity scores under a global trajectory-to-trajectory min-cost matching.
IdScores id_metrics(const std::vector<FrameDetections>& gt,
                    const std::vector<FrameDetections>& hyp, double iou_threshold = 0.5);

/// Absolute percentage error |X - Y| / Y * 100 of cumulative counts at every
/// multiple of `window`; checkpoints with zero GT count are skipped.
std::vector<std::pair<int, double>> counting_error_curve(
    const std::vector<long long>& gt_counts, const std::vector<long long>& hyp_counts,
    int window = 50);

struct Correlation {
  double slope = 0.0;
  double intercept = 0.0;
  double gamma = 0.0;
};

/// Least-squares fit Y = a*X + b plus Pearson correlation over
/// (hypothesis count, ground-truth count) pairs. Needs >= 3 pairs and
/// variance in X.
Correlation count_correlation(const std::vector<std::pair<double, double>>& pairs);

/// Zero-phase moving average: window = round(fps / (2*cutoff)), applied
/// forward then backward with edge replication. Length-preserving.
std::vector<double> lowpass(const std::vector<double>& series, double fps,
                            double cutoff_hz);

/// Frequency of the strongest spectral peak within [band_lo, band_hi] Hz:
/// detrended, Hann-windowed DFT magnitude, peak bin refined by parabolic
/// interpolation on the log magnitude. Requires length >= 4*fps/band_lo.
double dominant_frequency(const std::vector<double>& series, double fps,
                          double band_lo = 0.5, double band_hi = 3.0);

/// Cumulative number of distinct track ids whose first box is at or before
/// each frame (length = frames).
std::vector<long long> cumulative_id_counts(const std::vector<FrameDetections>& data,
                                            int frames);

}  // namespace cycletrack
