// Command-line front end: simulate | track | evaluate | analyze | pipeline.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cycletrack/displacement.hpp"
#include "cycletrack/frames_io.hpp"
#include "cycletrack/metrics.hpp"
#include "cycletrack/mot_io.hpp"
#include "cycletrack/simulator.hpp"
#include "cycletrack/tracker.hpp"
#include "run_config.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cycletrack;
using cycletrack::cli::RunConfig;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitRuntime = 4;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory: " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

void write_json(const std::string& path, const json& obj) {
  write_text(path, obj.dump(2) + "\n");
}

std::string velocity_csv(const std::vector<double>& trace) {
  std::ostringstream out;
  out << "frame,velocity_px_per_frame\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.4f\n", i + 2, trace[i]);
    out << buf;
  }
  return out.str();
}

std::vector<double> read_velocity_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<double> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#' || line.rfind("frame", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("expected 'frame,velocity' line", line_no);
    try {
      trace.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("invalid velocity value", line_no);
    }
  }
  return trace;
}

struct SimulateArtifacts {
  ScenarioTruth truth;
  std::vector<std::string> files;
};

/// Runs the simulator and writes gt.txt, det.txt, disp.csv, truth.json and
/// (optionally) rendered frames into `dir`.
SimulateArtifacts run_simulate(const RunConfig& config, const std::string& dir,
                               bool with_frames) {
  if (config.scenario.duration < 1) throw std::invalid_argument("empty scenario");
  ensure_dir(dir);
  SimulateArtifacts artifacts;
  artifacts.truth = generate_scenario(config.scenario);
  corrupt_detections(artifacts.truth);

  // Ground truth as MOT tracks.
  {
    std::vector<Tracklet> gt_tracks;
    std::map<std::int64_t, Tracklet> by_id;
    for (const auto& rec : artifacts.truth.records) {
      Tracklet& tr = by_id[rec.id];
      tr.id = rec.id;
      tr.history.emplace_back(rec.frame, rec.box);
    }
    for (auto& [id, tr] : by_id) gt_tracks.push_back(std::move(tr));
    save_mot_file(gt_tracks, dir + "/gt.txt");
    artifacts.files.push_back("gt.txt");
  }

  save_det_file(artifacts.truth.detections, dir + "/det.txt");
  artifacts.files.push_back("det.txt");

  {
    const DisplacementSidecar sidecar = make_displacement_sidecar(
        artifacts.truth, config.scenario.disp_noise_sigma, config.scenario.seed);
    std::ofstream out(dir + "/disp.csv");
    if (!out) throw std::runtime_error("cannot write file: " + dir + "/disp.csv");
    write_displacement_sidecar(sidecar, out);
    artifacts.files.push_back("disp.csv");
  }

  cli::save_truth(artifacts.truth, dir + "/truth.json");
  artifacts.files.push_back("truth.json");

  if (with_frames) {
    FramesWriter writer(dir + "/frames");
    for (int t = 1; t <= config.scenario.duration; ++t)
      writer.append(render_frame(artifacts.truth, t));
    writer.close();
    artifacts.files.push_back("frames.bin");
    artifacts.files.push_back("frames.json");
  }

  json manifest;
  manifest["seed"] = config.scenario.seed;
  manifest["config_hash"] = cli::fnv1a_hex(cli::config_json(config));
  manifest["track_count"] = artifacts.truth.track_count;
  manifest["files"] = artifacts.files;
  write_json(dir + "/manifest.json", manifest);
  artifacts.files.push_back("manifest.json");
  return artifacts;
}

struct TrackArtifacts {
  TrackerOutput output;
  std::int64_t count = 0;
  double runtime_ms = 0.0;
};

TrackArtifacts run_track(const RunConfig& config, const std::vector<FrameDetections>& dets,
                         BackwardSource& source, const std::string& dir, bool timing) {
  ensure_dir(dir);
  TrackArtifacts artifacts;
  const auto start = std::chrono::steady_clock::now();
  artifacts.output = Tracker::run(dets, source, config.tracker, config.kalman);
  artifacts.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  artifacts.count = cell_count(artifacts.output, config.tracker.min_hits);

  save_mot_file(confirmed_tracklets(artifacts.output, config.tracker.min_hits),
                dir + "/hyp.txt");
  write_text(dir + "/velocity.csv", velocity_csv(artifacts.output.velocity_trace));

  json count_json;
  count_json["count"] = artifacts.count;
  count_json["tracklets_created"] = artifacts.output.tracklets.size();
  count_json["frames"] = artifacts.output.frames;
  if (timing) {
    count_json["runtime_ms"] = artifacts.runtime_ms;
    count_json["frames_per_second"] =
        artifacts.runtime_ms > 0.0 ? artifacts.output.frames / (artifacts.runtime_ms / 1000.0)
                                   : 0.0;
  } else {
    count_json["runtime_ms"] = nullptr;
    count_json["frames_per_second"] = nullptr;
  }
  count_json["fusion_mode"] = to_string(config.tracker.fusion_mode);
  count_json["min_hits"] = config.tracker.min_hits;
  write_json(dir + "/count.json", count_json);
  return artifacts;
}

json metrics_json(const MetricsReport& report) {
  json obj;
  obj["prcn"] = report.prcn;
  obj["rccl"] = report.rccl;
  obj["idp"] = report.idp;
  obj["idr"] = report.idr;
  obj["idf1"] = report.idf1;
  obj["mt"] = report.mt;
  obj["ml"] = report.ml;
  obj["idsw"] = report.idsw;
  obj["idsw_pct"] = report.idsw_pct;
  obj["frag"] = report.frag;
  obj["frag_pct"] = report.frag_pct;
  obj["mota"] = report.mota;
  obj["tp"] = report.tp;
  obj["fp"] = report.fp;
  obj["fn"] = report.fn;
  obj["gt_boxes"] = report.gt_boxes;
  obj["hyp_boxes"] = report.hyp_boxes;
  obj["gt_tracks"] = report.gt_tracks;
  obj["hyp_tracks"] = report.hyp_tracks;
  return obj;
}

MetricsReport run_evaluate(const RunConfig& config, const std::string& gt_path,
                           const std::string& hyp_path, const std::string& dir) {
  ensure_dir(dir);
  const auto gt = load_mot_file(gt_path);
  const auto hyp = load_mot_file(hyp_path);
  if (gt.empty()) throw std::invalid_argument("empty ground truth: " + gt_path);
  const MetricsReport report = clear_mot(gt, hyp, config.iou_threshold);
  write_json(dir + "/metrics.json", metrics_json(report));
  return report;
}

struct AnalyzeResult {
  std::optional<double> dominant_freq;
  json report;
};

void save_correlation_plot(const std::vector<std::pair<double, double>>& pairs,
                           const Correlation& fit, const std::string& path);

AnalyzeResult run_analyze(const RunConfig& config, const std::vector<double>& velocity,
                          double fps, const std::string& gt_path,
                          const std::string& hyp_path,
                          const std::vector<std::pair<double, double>>& count_pairs,
                          const std::string& dir) {
  ensure_dir(dir);
  const auto& a = config.analysis;
  AnalyzeResult result;
  json& report = result.report;
  report["fps"] = fps;
  report["cutoff_hz"] = a.cutoff_hz;
  report["band_hz"] = {a.band_lo, a.band_hi};

  const std::vector<double> smoothed = lowpass(velocity, fps, a.cutoff_hz);
  try {
    result.dominant_freq = dominant_frequency(smoothed, fps, a.band_lo, a.band_hi);
    report["dominant_freq_hz"] = *result.dominant_freq;
  } catch (const std::exception& e) {
    report["dominant_freq_hz"] = nullptr;
    report["dominant_freq_error"] = e.what();
  }
  report["smoothed_velocity"] = smoothed;

  // Velocity plot: raw + smoothed trace (frames 2..T).
  {
    plot::Figure fig;
    fig.title = "Mean cell velocity";
    fig.x_label = "frame";
    fig.y_label = "velocity (px/frame)";
    fig.caption = "Raw per-frame mean matched displacement and its zero-phase smoothed trace.";
    plot::Series raw{"raw", "#9ecae9", {}, false};
    plot::Series smooth{"smoothed", "#1f5fa8", {}, false};
    for (std::size_t i = 0; i < velocity.size(); ++i) {
      raw.points.emplace_back(static_cast<double>(i + 2), velocity[i]);
      smooth.points.emplace_back(static_cast<double>(i + 2), smoothed[i]);
    }
    fig.series = {raw, smooth};
    plot::save_svg(fig, dir + "/velocity.svg");
  }

  // Counting error curves when both track files are given.
  if (!gt_path.empty() && !hyp_path.empty()) {
    const auto gt = load_mot_file(gt_path);
    const auto hyp = load_mot_file(hyp_path);
    int frames = static_cast<int>(velocity.size()) + 1;
    for (const auto& fd : gt) frames = std::max(frames, fd.frame);
    for (const auto& fd : hyp) frames = std::max(frames, fd.frame);
    const auto gt_counts = cumulative_id_counts(gt, frames);
    const auto hyp_counts = cumulative_id_counts(hyp, frames);
    const auto curve = counting_error_curve(gt_counts, hyp_counts, a.window);

    json curve_json = json::array();
    for (const auto& [frame, err] : curve)
      curve_json.push_back({{"frame", frame}, {"error_pct", err}});
    report["count_error_curve"] = std::move(curve_json);

    std::ostringstream csv;
    csv << "frame,error_pct\n";
    for (const auto& [frame, err] : curve) {
      char row[64];
      std::snprintf(row, sizeof(row), "%d,%.4f\n", frame, err);
      csv << row;
    }
    write_text(dir + "/count_error.csv", csv.str());

    // Windowed absolute count error (new cells per window), plus its
    // correlation with the smoothed velocity at the window ends.
    json window_json = json::array();
    std::vector<std::pair<double, double>> err_vs_vel;
    for (int f = a.window; f <= frames; f += a.window) {
      const long long gt_new = gt_counts[static_cast<std::size_t>(f - 1)] -
                               (f - a.window >= 1
                                    ? gt_counts[static_cast<std::size_t>(f - a.window - 1)]
                                    : 0);
      const long long hyp_new = hyp_counts[static_cast<std::size_t>(f - 1)] -
                                (f - a.window >= 1
                                     ? hyp_counts[static_cast<std::size_t>(f - a.window - 1)]
                                     : 0);
      const double err = std::abs(static_cast<double>(hyp_new - gt_new));
      window_json.push_back({{"frame", f}, {"abs_error", err}});
      if (f - 2 >= 0 && f - 2 < static_cast<int>(smoothed.size()))
        err_vs_vel.emplace_back(err, smoothed[static_cast<std::size_t>(f - 2)]);
    }
    report["window_count_errors"] = std::move(window_json);
    if (err_vs_vel.size() >= 3) {
      try {
        report["error_velocity_correlation"] = count_correlation(err_vs_vel).gamma;
      } catch (const std::exception&) {
        report["error_velocity_correlation"] = nullptr;
      }
    }

    plot::Figure fig;
    fig.title = "Cumulative counting error";
    fig.x_label = "frame";
    fig.y_label = "|count error| (%)";
    fig.caption = "Absolute percentage error of the cumulative cell count, reported every " +
                  std::to_string(a.window) + " frames.";
    plot::Series series{"count error", "#2a9d4e", {}, false};
    for (const auto& [frame, err] : curve)
      series.points.emplace_back(static_cast<double>(frame), err);
    fig.series = {series};
    plot::save_svg(fig, dir + "/count_error.svg");
  }

  // Count correlation across runs (one point per video/seed).
  if (count_pairs.size() >= 3) {
    try {
      const Correlation fit = count_correlation(count_pairs);
      report["correlation"] = {{"slope", fit.slope},
                               {"intercept", fit.intercept},
                               {"gamma", fit.gamma},
                               {"pairs", count_pairs.size()}};
      save_correlation_plot(count_pairs, fit, dir + "/correlation.svg");
    } catch (const std::exception& e) {
      report["correlation"] = {{"warning", e.what()}};
    }
  } else if (!count_pairs.empty()) {
    report["correlation"] = {{"warning", "need at least 3 count pairs"}};
  }

  write_json(dir + "/analysis.json", report);
  return result;
}

std::vector<std::pair<double, double>> read_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::pair<double, double>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#' || std::isalpha(static_cast<unsigned char>(line.front()))) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'hyp,gt' pair", line_no);
    try {
      pairs.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("invalid count pair", line_no);
    }
  }
  return pairs;
}

struct SourceHolder {
  std::optional<ScenarioTruth> truth;
  std::vector<Heatmap> frames;
  std::unique_ptr<BackwardSource> source;
};

SourceHolder make_source(const std::string& backward, const RunConfig& config,
                         const std::string& truth_path, const std::string& sidecar_path,
                         const std::string& frames_base, double disp_sigma,
                         std::uint64_t seed) {
  SourceHolder holder;
  if (backward == "oracle") {
    if (truth_path.empty())
      throw std::invalid_argument("--backward oracle requires --truth truth.json");
    holder.truth = cli::load_truth(truth_path);
    holder.source = std::make_unique<OracleBackwardSource>(*holder.truth, disp_sigma, seed);
  } else if (backward == "sidecar") {
    if (sidecar_path.empty())
      throw std::invalid_argument("--backward sidecar requires --sidecar disp.csv");
    holder.source =
        std::make_unique<SidecarBackwardSource>(load_displacement_sidecar(sidecar_path));
  } else if (backward == "ncc") {
    if (frames_base.empty())
      throw std::invalid_argument("--backward ncc requires --frames <basename>");
    holder.frames = load_frames(frames_base).all();
    const int radius = static_cast<int>(std::lround(2.5 * config.scenario.base_speed)) + 2;
    holder.source = std::make_unique<NccBackwardSource>(holder.frames, radius);
  } else if (backward == "none") {
    holder.source = std::make_unique<NullBackwardSource>();
  } else {
    throw std::invalid_argument("unknown backward source: " + backward);
  }
  return holder;
}

/// Scatter + least-squares fit of per-run (tracker count, gt count) pairs.
void save_correlation_plot(const std::vector<std::pair<double, double>>& pairs,
                           const Correlation& fit, const std::string& path) {
  plot::Figure fig;
  fig.title = "Count agreement";
  fig.x_label = "tracker count";
  fig.y_label = "ground-truth count";
  char caption[160];
  std::snprintf(caption, sizeof(caption), "Y = %.4f X + %.4f, gamma = %.4f", fit.slope,
                fit.intercept, fit.gamma);
  fig.caption = caption;
  plot::Series points{"runs", "#d1495b", pairs, true};
  plot::Series line{"least-squares fit", "#444444", {}, false};
  double xmin = pairs[0].first, xmax = xmin;
  for (const auto& [x, y] : pairs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  line.points = {{xmin, fit.slope * xmin + fit.intercept},
                 {xmax, fit.slope * xmax + fit.intercept}};
  fig.series = {points, line};
  plot::save_svg(fig, path);
}

// ---------------------------------------------------------------------------

int cmd_pipeline(RunConfig config, bool ablation, bool timing, bool density_sweep) {
  if (config.seeds.empty()) throw std::invalid_argument("seed list is empty");
  ensure_dir(config.out_dir);

  const std::vector<FusionMode> modes =
      ablation ? std::vector<FusionMode>{FusionMode::kCycle, FusionMode::kCtOnly,
                                         FusionMode::kSortOnly}
               : std::vector<FusionMode>{config.tracker.fusion_mode};

  json aggregate;
  aggregate["config_hash"] = cli::fnv1a_hex(cli::config_json(config));
  aggregate["seeds"] = config.seeds;

  for (const FusionMode mode : modes) {
    RunConfig run_cfg = config;
    run_cfg.tracker.fusion_mode = mode;
    json rows = json::array();
    std::vector<std::pair<double, double>> count_pairs;
    std::vector<double> accuracies;

    for (std::size_t k = 0; k < config.seeds.size(); ++k) {
      const std::uint64_t seed = config.seeds[k];
      run_cfg.scenario.seed = seed;
      // The sweep stands in for videos of different cell density; a fixed
      // scenario would give every seed the same ground-truth count.
      if (density_sweep)
        run_cfg.scenario.spawn_spacing =
            config.scenario.spawn_spacing * (0.9 + 0.08 * static_cast<double>(k));
      const std::string seed_dir = config.out_dir + "/" + to_string(mode) + "/seed_" +
                                   std::to_string(seed);
      SimulateArtifacts sim = run_simulate(run_cfg, seed_dir, false);

      OracleBackwardSource source(sim.truth, run_cfg.scenario.disp_noise_sigma, seed);
      TrackArtifacts tracked =
          run_track(run_cfg, sim.truth.detections, source, seed_dir, timing);
      const MetricsReport report =
          run_evaluate(run_cfg, seed_dir + "/gt.txt", seed_dir + "/hyp.txt", seed_dir);
      AnalyzeResult analysis =
          run_analyze(run_cfg, tracked.output.velocity_trace, run_cfg.scenario.fps,
                      seed_dir + "/gt.txt", seed_dir + "/hyp.txt", {}, seed_dir);

      const double accuracy =
          sim.truth.track_count > 0
              ? 100.0 * (1.0 - std::abs(static_cast<double>(tracked.count) -
                                        static_cast<double>(sim.truth.track_count)) /
                                   static_cast<double>(sim.truth.track_count))
              : 0.0;
      accuracies.push_back(accuracy);
      count_pairs.emplace_back(static_cast<double>(tracked.count),
                               static_cast<double>(sim.truth.track_count));

      json row;
      row["seed"] = seed;
      row["gt_count"] = sim.truth.track_count;
      row["count"] = tracked.count;
      row["count_accuracy_pct"] = accuracy;
      row["mota"] = report.mota;
      row["idf1"] = report.idf1;
      row["idsw"] = report.idsw;
      row["frag"] = report.frag;
      if (analysis.dominant_freq) row["dominant_freq_hz"] = *analysis.dominant_freq;
      rows.push_back(std::move(row));
    }

    double mean = 0.0;
    for (const double a : accuracies) mean += a;
    mean /= static_cast<double>(accuracies.size());
    double var = 0.0;
    for (const double a : accuracies) var += (a - mean) * (a - mean);
    const double stddev =
        accuracies.size() > 1 ? std::sqrt(var / static_cast<double>(accuracies.size() - 1))
                              : 0.0;

    json block;
    block["runs"] = std::move(rows);
    block["count_accuracy_mean_pct"] = mean;
    block["count_accuracy_std_pct"] = stddev;
    if (count_pairs.size() >= 3) {
      bool gt_varies = false;
      for (const auto& [x, y] : count_pairs) gt_varies |= y != count_pairs[0].second;
      if (!gt_varies) {
        block["count_correlation"] = {
            {"warning",
             "ground-truth counts are identical across runs; vary spawn_spacing or "
             "duration per seed for a meaningful correlation"}};
      } else {
        try {
          const Correlation fit = count_correlation(count_pairs);
          block["count_correlation"] = {{"slope", fit.slope},
                                        {"intercept", fit.intercept},
                                        {"gamma", fit.gamma}};
        } catch (const std::exception& e) {
          block["count_correlation"] = {{"warning", e.what()}};
        }
      }
    }
    // Cross-seed correlation plot for this mode.
    if (count_pairs.size() >= 3 && block.contains("count_correlation") &&
        !block["count_correlation"].contains("warning")) {
      Correlation fit;
      fit.slope = block["count_correlation"]["slope"];
      fit.intercept = block["count_correlation"]["intercept"];
      fit.gamma = block["count_correlation"]["gamma"];
      save_correlation_plot(count_pairs, fit,
                            config.out_dir + "/" + to_string(mode) + "/correlation.svg");
    }
    aggregate[to_string(mode)] = std::move(block);
  }

  write_json(config.out_dir + "/aggregate.json", aggregate);
  std::cout << "pipeline complete: " << config.out_dir << "/aggregate.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bidirectional cell tracking toolkit: simulate capillary flow, track "
               "detections, and evaluate counting and velocity analytics"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  // --- simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
  std::string sim_preset = "s1";
  int sim_duration = -1;
  double sim_fps = -1.0;
  bool sim_frames = false;
  double sim_lambda_fn = -1.0, sim_lambda_fp = -1.0;
  simulate->add_option("--config", config_path, "JSON config file");
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Scenario seed")->each([&](const std::string&) {
    seed_set = true;
  });
  auto* preset_opt =
      simulate->add_option("--preset", sim_preset, "Scenario preset: s1 | s2 | clean");
  simulate->add_option("--duration", sim_duration, "Frames to simulate");
  simulate->add_option("--fps", sim_fps, "Frame rate (Hz)");
  simulate->add_option("--lambda-fn", sim_lambda_fn, "Per-detection drop probability");
  simulate->add_option("--lambda-fp", sim_lambda_fp, "False positives per true detection");
  simulate->add_flag("--frames", sim_frames, "Also render frames.bin/frames.json");

  // --- track
  auto* track = app.add_subcommand("track", "Run the tracker over a detection file");
  std::string det_path, backward = "oracle", truth_path, sidecar_path, frames_base;
  std::string fusion = "";
  double disp_sigma = -1.0, conf_threshold = -1.0;
  int max_age = -1, min_hits = -1;
  bool no_timing = false;
  track->add_option("--config", config_path, "JSON config file");
  track->add_option("--det", det_path, "Detection file (MOT csv)")->required();
  track->add_option("--out", out_dir, "Output directory")->required();
  track->add_option("--backward", backward, "Backward source: oracle | ncc | sidecar | none");
  track->add_option("--truth", truth_path, "truth.json (oracle source)");
  track->add_option("--sidecar", sidecar_path, "Displacement sidecar csv");
  track->add_option("--frames", frames_base, "Frames basename (ncc source)");
  track->add_option("--fusion-mode", fusion, "cycle | sort_only | ct_only");
  track->add_option("--disp-sigma", disp_sigma, "Oracle displacement noise (px)");
  track->add_option("--conf", conf_threshold, "Detection confidence gate");
  track->add_option("--max-age", max_age, "Frames a tracklet may coast");
  track->add_option("--min-hits", min_hits, "Hits needed to count a cell");
  track->add_option("--seed", seed, "Oracle noise seed")->each([&](const std::string&) {
    seed_set = true;
  });
  track->add_flag("--no-timing", no_timing, "Write null timing fields (reproducible runs)");

  // --- evaluate
  auto* evaluate = app.add_subcommand("evaluate", "CLEAR-MOT + identity metrics");
  std::string gt_path, hyp_path;
  double iou_threshold = -1.0;
  evaluate->add_option("--config", config_path, "JSON config file");
  evaluate->add_option("--gt", gt_path, "Ground-truth MOT file")->required();
  evaluate->add_option("--hyp", hyp_path, "Hypothesis MOT file")->required();
  evaluate->add_option("--out", out_dir, "Output directory")->required();
  evaluate->add_option("--iou", iou_threshold, "IoU matching threshold");

  // --- analyze
  auto* analyze = app.add_subcommand("analyze", "Velocity and counting analytics");
  std::string velocity_path, pairs_path;
  double fps = -1.0, cutoff = -1.0, band_lo = -1.0, band_hi = -1.0;
  analyze->add_option("--config", config_path, "JSON config file");
  analyze->add_option("--velocity", velocity_path, "velocity.csv from `track`")->required();
  analyze->add_option("--fps", fps, "Sampling rate of the trace (Hz)");
  analyze->add_option("--out", out_dir, "Output directory")->required();
  analyze->add_option("--gt", gt_path, "Ground-truth MOT file (count curves)");
  analyze->add_option("--hyp", hyp_path, "Hypothesis MOT file (count curves)");
  analyze->add_option("--pairs", pairs_path, "CSV of hyp,gt count pairs (correlation)");
  analyze->add_option("--cutoff", cutoff, "Lowpass cutoff (Hz)");
  analyze->add_option("--band-lo", band_lo, "Dominant-frequency band floor (Hz)");
  analyze->add_option("--band-hi", band_hi, "Dominant-frequency band ceiling (Hz)");

  // --- pipeline
  auto* pipeline = app.add_subcommand("pipeline", "simulate + track + evaluate + analyze per seed");
  std::string seeds_arg;
  bool ablation = false, with_timing = false;
  int pipe_duration = -1;
  pipeline->add_option("--config", config_path, "JSON config file");
  pipeline->add_option("--out", out_dir, "Output directory")->required();
  pipeline->add_option("--seeds", seeds_arg, "Comma-separated seed list (e.g. 0,1,2)");
  pipeline->add_option("--fusion-mode", fusion, "cycle | sort_only | ct_only");
  pipeline->add_option("--duration", pipe_duration, "Frames per scenario");
  pipeline->add_flag("--ablation", ablation, "Run all three fusion modes");
  pipeline->add_flag("--timing", with_timing, "Include wall-clock timing in count.json");
  bool density_sweep = false;
  pipeline->add_flag("--density-sweep", density_sweep,
                     "Scale spawn spacing per seed (count-correlation protocol)");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (!config_path.empty()) config = cycletrack::cli::load_run_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!fusion.empty()) config.tracker.fusion_mode = fusion_mode_from_string(fusion);

    if (app.got_subcommand(simulate)) {
      if (sim_preset == "s2") config.scenario = s2_scenario(config.scenario.seed);
      else if (sim_preset == "s1" && preset_opt->count() > 0)
        config.scenario = s1_scenario(config.scenario.seed);
      else if (sim_preset == "clean") {
        config.scenario = s1_scenario(config.scenario.seed);
        config.scenario.det_jitter = 0.0;
        config.scenario.lambda_fn = 0.0;
        config.scenario.lambda_fp = 0.0;
        config.scenario.disp_noise_sigma = 0.0;
        config.scenario.cell_size_jitter = 0.0;
      } else if (sim_preset != "s1" && !sim_preset.empty()) {
        throw std::invalid_argument("unknown preset: " + sim_preset);
      }
      if (seed_set) config.scenario.seed = seed;
      if (sim_duration >= 0) config.scenario.duration = sim_duration;
      if (sim_fps > 0) config.scenario.fps = sim_fps;
      if (sim_lambda_fn >= 0) config.scenario.lambda_fn = sim_lambda_fn;
      if (sim_lambda_fp >= 0) config.scenario.lambda_fp = sim_lambda_fp;
      run_simulate(config, config.out_dir, sim_frames);
      std::cout << "scenario written to " << config.out_dir << "\n";
      return 0;
    }

    if (app.got_subcommand(track)) {
      if (conf_threshold >= 0) config.tracker.conf_threshold = conf_threshold;
      if (max_age >= 0) config.tracker.max_age = max_age;
      if (min_hits >= 0) config.tracker.min_hits = min_hits;
      if (disp_sigma < 0) disp_sigma = config.scenario.disp_noise_sigma;
      if (seed_set) config.scenario.seed = seed;

      const auto dets = load_mot_file(det_path);
      SourceHolder holder = make_source(backward, config, truth_path, sidecar_path,
                                        frames_base, disp_sigma, config.scenario.seed);
      TrackArtifacts artifacts =
          run_track(config, dets, *holder.source, config.out_dir, !no_timing);
      std::cout << "tracked " << artifacts.output.frames << " frames, count = "
                << artifacts.count << "\n";
      return 0;
    }

    if (app.got_subcommand(evaluate)) {
      if (iou_threshold > 0) config.iou_threshold = iou_threshold;
      const MetricsReport report = run_evaluate(config, gt_path, hyp_path, config.out_dir);
      std::printf("MOTA %.2f IDF1 %.2f IDSw %lld Frag %lld\n", report.mota, report.idf1,
                  report.idsw, report.frag);
      return 0;
    }

    if (app.got_subcommand(analyze)) {
      if (fps <= 0) fps = config.scenario.fps;
      if (cutoff > 0) config.analysis.cutoff_hz = cutoff;
      if (band_lo > 0) config.analysis.band_lo = band_lo;
      if (band_hi > 0) config.analysis.band_hi = band_hi;
      const auto velocity = read_velocity_csv(velocity_path);
      std::vector<std::pair<double, double>> pairs;
      if (!pairs_path.empty()) pairs = read_pairs_csv(pairs_path);
      AnalyzeResult result =
          run_analyze(config, velocity, fps, gt_path, hyp_path, pairs, config.out_dir);
      if (result.dominant_freq)
        std::printf("dominant frequency: %.3f Hz\n", *result.dominant_freq);
      else
        std::cout << "dominant frequency: not identifiable\n";
      return 0;
    }

    if (app.got_subcommand(pipeline)) {
      if (!seeds_arg.empty()) {
        config.seeds.clear();
        std::stringstream ss(seeds_arg);
        std::string tok;
        while (std::getline(ss, tok, ','))
          config.seeds.push_back(std::stoull(tok));
      }
      if (pipe_duration >= 0) config.scenario.duration = pipe_duration;
      return cmd_pipeline(config, ablation, with_timing, density_sweep);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error (line " << e.line() << "): " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
