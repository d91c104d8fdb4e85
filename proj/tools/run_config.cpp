#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cycletrack::cli {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

void parse_path(PathSpec& path, const json& obj) {
  reject_unknown(obj, {"kind", "x0", "x1", "cy", "amplitude", "wavelength", "points"},
                 "scenario.path");
  if (obj.contains("kind")) {
    const std::string kind = obj["kind"];
    if (kind == "sinusoid") path.kind = PathSpec::Kind::kSinusoid;
    else if (kind == "polyline") path.kind = PathSpec::Kind::kPolyline;
    else throw std::invalid_argument("path kind must be sinusoid or polyline");
  }
  if (obj.contains("x0")) path.x0 = obj["x0"];
  if (obj.contains("x1")) path.x1 = obj["x1"];
  if (obj.contains("cy")) path.cy = obj["cy"];
  if (obj.contains("amplitude")) path.amplitude = obj["amplitude"];
  if (obj.contains("wavelength")) path.wavelength = obj["wavelength"];
  if (obj.contains("points")) {
    path.points.clear();
    for (const auto& pt : obj["points"])
      path.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
  }
}

void parse_scenario(ScenarioConfig& cfg, const json& obj) {
  reject_unknown(obj,
                 {"fps", "duration", "path", "frame_width", "frame_height", "base_speed",
                  "pulse_amplitude", "pulse_freq", "spawn_spacing", "cell_width",
                  "cell_height", "cell_size_jitter", "det_jitter", "lambda_fp",
                  "lambda_fn", "disp_noise_sigma", "render_noise_sigma", "seed"},
                 "scenario");
  if (obj.contains("fps")) cfg.fps = obj["fps"];
  if (obj.contains("duration")) cfg.duration = obj["duration"];
  if (obj.contains("path")) parse_path(cfg.path, obj["path"]);
  if (obj.contains("frame_width")) cfg.frame_width = obj["frame_width"];
  if (obj.contains("frame_height")) cfg.frame_height = obj["frame_height"];
  if (obj.contains("base_speed")) cfg.base_speed = obj["base_speed"];
  if (obj.contains("pulse_amplitude")) cfg.pulse_amplitude = obj["pulse_amplitude"];
  if (obj.contains("pulse_freq")) cfg.pulse_freq = obj["pulse_freq"];
  if (obj.contains("spawn_spacing")) cfg.spawn_spacing = obj["spawn_spacing"];
  if (obj.contains("cell_width")) cfg.cell_width = obj["cell_width"];
  if (obj.contains("cell_height")) cfg.cell_height = obj["cell_height"];
  if (obj.contains("cell_size_jitter")) cfg.cell_size_jitter = obj["cell_size_jitter"];
  if (obj.contains("det_jitter")) cfg.det_jitter = obj["det_jitter"];
  if (obj.contains("lambda_fp")) cfg.lambda_fp = obj["lambda_fp"];
  if (obj.contains("lambda_fn")) cfg.lambda_fn = obj["lambda_fn"];
  if (obj.contains("disp_noise_sigma")) cfg.disp_noise_sigma = obj["disp_noise_sigma"];
  if (obj.contains("render_noise_sigma")) cfg.render_noise_sigma = obj["render_noise_sigma"];
  if (obj.contains("seed")) cfg.seed = obj["seed"];
}

void parse_tracker(TrackerConfig& cfg, KalmanNoise& noise, const json& obj) {
  reject_unknown(obj,
                 {"conf_threshold", "max_age", "min_hits", "base_blend_enabled",
                  "fallback_gate", "fusion_mode", "kalman"},
                 "tracker");
  if (obj.contains("conf_threshold")) cfg.conf_threshold = obj["conf_threshold"];
  if (obj.contains("max_age")) cfg.max_age = obj["max_age"];
  if (obj.contains("min_hits")) cfg.min_hits = obj["min_hits"];
  if (obj.contains("base_blend_enabled")) cfg.base_blend_enabled = obj["base_blend_enabled"];
  if (obj.contains("fallback_gate")) cfg.fallback_gate = obj["fallback_gate"];
  if (obj.contains("fusion_mode"))
    cfg.fusion_mode = fusion_mode_from_string(obj["fusion_mode"]);
  if (obj.contains("kalman")) {
    const json& k = obj["kalman"];
    reject_unknown(k, {"init_pos_sigma", "init_vel_sigma", "process_pos", "process_vel",
                       "meas_sigma"},
                   "tracker.kalman");
    if (k.contains("init_pos_sigma")) noise.init_pos_sigma = k["init_pos_sigma"];
    if (k.contains("init_vel_sigma")) noise.init_vel_sigma = k["init_vel_sigma"];
    if (k.contains("process_pos")) noise.process_pos = k["process_pos"];
    if (k.contains("process_vel")) noise.process_vel = k["process_vel"];
    if (k.contains("meas_sigma")) noise.meas_sigma = k["meas_sigma"];
  }
}

}  // namespace

void apply_json(RunConfig& config, const std::string& json_text) {
  const json obj = json::parse(json_text);
  reject_unknown(obj, {"scenario", "tracker", "evaluation", "analysis", "seeds", "out_dir"},
                 "config");
  if (obj.contains("scenario")) parse_scenario(config.scenario, obj["scenario"]);
  if (obj.contains("tracker")) parse_tracker(config.tracker, config.kalman, obj["tracker"]);
  if (obj.contains("evaluation")) {
    reject_unknown(obj["evaluation"], {"iou_threshold"}, "evaluation");
    if (obj["evaluation"].contains("iou_threshold"))
      config.iou_threshold = obj["evaluation"]["iou_threshold"];
  }
  if (obj.contains("analysis")) {
    const json& a = obj["analysis"];
    reject_unknown(a, {"cutoff_hz", "band_lo", "band_hi", "window"}, "analysis");
    if (a.contains("cutoff_hz")) config.analysis.cutoff_hz = a["cutoff_hz"];
    if (a.contains("band_lo")) config.analysis.band_lo = a["band_lo"];
    if (a.contains("band_hi")) config.analysis.band_hi = a["band_hi"];
    if (a.contains("window")) config.analysis.window = a["window"];
  }
  if (obj.contains("seeds")) {
    config.seeds.clear();
    for (const auto& s : obj["seeds"]) config.seeds.push_back(s.get<std::uint64_t>());
  }
  if (obj.contains("out_dir")) config.out_dir = obj["out_dir"];
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig config;
  apply_json(config, text.str());
  return config;
}

std::string config_json(const RunConfig& c) {
  json path;
  path["kind"] = c.scenario.path.kind == PathSpec::Kind::kSinusoid ? "sinusoid" : "polyline";
  if (c.scenario.path.kind == PathSpec::Kind::kSinusoid) {
    path["x0"] = c.scenario.path.x0;
    path["x1"] = c.scenario.path.x1;
    path["cy"] = c.scenario.path.cy;
    path["amplitude"] = c.scenario.path.amplitude;
    path["wavelength"] = c.scenario.path.wavelength;
  } else {
    json pts = json::array();
    for (const auto& p : c.scenario.path.points) pts.push_back({p.x(), p.y()});
    path["points"] = pts;
  }

  json obj;
  obj["scenario"] = {{"fps", c.scenario.fps},
                     {"duration", c.scenario.duration},
                     {"path", path},
                     {"frame_width", c.scenario.frame_width},
                     {"frame_height", c.scenario.frame_height},
                     {"base_speed", c.scenario.base_speed},
                     {"pulse_amplitude", c.scenario.pulse_amplitude},
                     {"pulse_freq", c.scenario.pulse_freq},
                     {"spawn_spacing", c.scenario.spawn_spacing},
                     {"cell_width", c.scenario.cell_width},
                     {"cell_height", c.scenario.cell_height},
                     {"cell_size_jitter", c.scenario.cell_size_jitter},
                     {"det_jitter", c.scenario.det_jitter},
                     {"lambda_fp", c.scenario.lambda_fp},
                     {"lambda_fn", c.scenario.lambda_fn},
                     {"disp_noise_sigma", c.scenario.disp_noise_sigma},
                     {"render_noise_sigma", c.scenario.render_noise_sigma},
                     {"seed", c.scenario.seed}};
  obj["tracker"] = {{"conf_threshold", c.tracker.conf_threshold},
                    {"max_age", c.tracker.max_age},
                    {"min_hits", c.tracker.min_hits},
                    {"base_blend_enabled", c.tracker.base_blend_enabled},
                    {"fallback_gate", c.tracker.fallback_gate},
                    {"fusion_mode", to_string(c.tracker.fusion_mode)},
                    {"kalman",
                     {{"init_pos_sigma", c.kalman.init_pos_sigma},
                      {"init_vel_sigma", c.kalman.init_vel_sigma},
                      {"process_pos", c.kalman.process_pos},
                      {"process_vel", c.kalman.process_vel},
                      {"meas_sigma", c.kalman.meas_sigma}}}};
  obj["evaluation"] = {{"iou_threshold", c.iou_threshold}};
  obj["analysis"] = {{"cutoff_hz", c.analysis.cutoff_hz},
                     {"band_lo", c.analysis.band_lo},
                     {"band_hi", c.analysis.band_hi},
                     {"window", c.analysis.window}};
  obj["seeds"] = c.seeds;
  // out_dir is deliberately not part of the canonical form: the hash should
  // identify the computation, not where its results land.
  return obj.dump(2);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void save_truth(const ScenarioTruth& truth, const std::string& path) {
  json obj;
  {
    RunConfig wrap;
    wrap.scenario = truth.config;
    obj["scenario"] = json::parse(config_json(wrap))["scenario"];
  }
  obj["track_count"] = truth.track_count;
  json records = json::array();
  for (const auto& rec : truth.records)
    records.push_back({rec.frame, rec.id, rec.box.cx, rec.box.cy, rec.box.w, rec.box.h});
  obj["records"] = std::move(records);
  obj["speed_series"] = truth.speed_series;
  json backward = json::array();
  for (const auto& [key, v] : truth.true_backward)
    backward.push_back({key.first, key.second, v.x(), v.y()});
  obj["true_backward"] = std::move(backward);

  json corruption;
  corruption["true_total"] = truth.corruption.true_total;
  corruption["dropped_total"] = truth.corruption.dropped_total;
  corruption["injected_total"] = truth.corruption.injected_total;
  json frames = json::array();
  for (const auto& fc : truth.corruption.frames)
    frames.push_back({{"dropped", fc.dropped_ids}, {"det_to_track", fc.det_to_track}});
  corruption["frames"] = std::move(frames);
  obj["corruption"] = std::move(corruption);

  // The corrupted detections themselves live in det.txt; the truth file only
  // carries what detections cannot express.
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << obj.dump() << '\n';
}

ScenarioTruth load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json obj;
  in >> obj;

  ScenarioTruth truth;
  {
    RunConfig wrap;
    json cfg;
    cfg["scenario"] = obj.at("scenario");
    apply_json(wrap, cfg.dump());
    truth.config = wrap.scenario;
  }
  truth.track_count = obj.at("track_count");
  for (const auto& rec : obj.at("records"))
    truth.records.push_back({rec.at(0).get<int>(), rec.at(1).get<std::int64_t>(),
                             BBox{rec.at(2), rec.at(3), rec.at(4), rec.at(5)}});
  truth.speed_series = obj.at("speed_series").get<std::vector<double>>();
  for (const auto& entry : obj.at("true_backward"))
    truth.true_backward[{entry.at(0).get<int>(), entry.at(1).get<std::int64_t>()}] =
        Vec2(entry.at(2), entry.at(3));
  const json& corruption = obj.at("corruption");
  truth.corruption.true_total = corruption.at("true_total");
  truth.corruption.dropped_total = corruption.at("dropped_total");
  truth.corruption.injected_total = corruption.at("injected_total");
  for (const auto& fc : corruption.at("frames")) {
    FrameCorruption frame;
    frame.dropped_ids = fc.at("dropped").get<std::vector<std::int64_t>>();
    frame.det_to_track = fc.at("det_to_track").get<std::vector<std::int64_t>>();
    truth.corruption.frames.push_back(std::move(frame));
  }
  return truth;
}

}  // namespace cycletrack::cli
