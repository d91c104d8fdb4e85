#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cycletrack/heatmap.hpp"
#include "cycletrack/simulator.hpp"
#include "cycletrack/types.hpp"

namespace cycletrack {

/// Backward displacement (current frame -> previous frame) per detection of
/// one frame. Entries are absent where no estimate exists (e.g. false
/// positives, newly entered cells, failed correlation).
struct DisplacementSet {
  std::vector<std::optional<Vec2>> vectors;

  std::size_t size() const { return vectors.size(); }
};

/// Ground-truth backward vectors plus Gaussian noise, aligned with the
/// corrupted detections of `frame`. Deterministic given (rng_seed, frame).
DisplacementSet oracle_displacement(const ScenarioTruth& truth, int frame,
                                    double noise_sigma, std::uint64_t rng_seed);

/// Integer-pixel normalized cross-correlation search: where in frame_prev
/// does the detection's patch from frame_t come from? Returns the offset
/// maximizing NCC within +/- search_radius, or nullopt when the best
/// correlation falls below 0.5 or every candidate window is degenerate.
/// The patch must fit inside frame_t.
std::optional<Vec2> ncc_displacement(const Heatmap& frame_t, const Heatmap& frame_prev,
                                     const Detection& det, int search_radius);

/// Mean L1 deviation between predicted backward vectors and the true ones
/// for the matched (non-FP, surviving) detections of `frame`. Errors when no
/// detection has both a prediction and a truth pairing.
double displacement_l1(const DisplacementSet& pred, const ScenarioTruth& truth, int frame);

}  // namespace cycletrack
