#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cycletrack/kalman.hpp"
#include "cycletrack/simulator.hpp"
#include "cycletrack/tracker.hpp"
#include "cycletrack/types.hpp"

namespace cycletrack::cli {

struct AnalysisConfig {
  double cutoff_hz = 3.0;
  double band_lo = 0.7;
  double band_hi = 3.0;
  int window = 50;
};

/// Merged run configuration: JSON file first, command-line flags override.
/// Unknown JSON keys are rejected.
struct RunConfig {
  ScenarioConfig scenario = s1_scenario(0);
  TrackerConfig tracker = s1_tracker_config();
  KalmanNoise kalman = s1_kalman_noise();
  double iou_threshold = 0.5;
  AnalysisConfig analysis;
  std::vector<std::uint64_t> seeds = {0};
  std::string out_dir;
};

RunConfig load_run_config(const std::string& path);
void apply_json(RunConfig& config, const std::string& json_text);

/// Canonical JSON rendering of the configuration (used for manifests).
std::string config_json(const RunConfig& config);

/// FNV-1a hash of a string, hex-encoded; stable across runs and platforms.
std::string fnv1a_hex(const std::string& text);

// Scenario truth round-trip for the oracle backward source.
void save_truth(const ScenarioTruth& truth, const std::string& path);
ScenarioTruth load_truth(const std::string& path);

}  // namespace cycletrack::cli
