#include "cycletrack/mot_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cycletrack {
namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& field, std::size_t line_no) {
  try {
    std::size_t consumed = 0;
    double v = std::stod(field, &consumed);
    while (consumed < field.size() && std::isspace(static_cast<unsigned char>(field[consumed])))
      ++consumed;
    if (consumed != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError("invalid numeric field '" + field + "'", line_no);
  }
}

long long parse_int(const std::string& field, std::size_t line_no) {
  double v = parse_double(field, line_no);
  long long i = static_cast<long long>(v);
  if (static_cast<double>(i) != v)
    throw ParseError("expected integer, got '" + field + "'", line_no);
  return i;
}

}  // namespace

std::vector<FrameDetections> parse_mot_file(std::istream& in) {
  std::map<int, std::vector<Detection>> by_frame;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_blank(line) || line.front() == '#') continue;

    auto fields = split_csv(line);
    if (fields.size() < 7)
      throw ParseError("expected >= 7 comma-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);

    Detection det;
    long long frame = parse_int(fields[0], line_no);
    if (frame < 1) throw ParseError("frame index must be >= 1", line_no);
    det.frame = static_cast<int>(frame);

    long long id = parse_int(fields[1], line_no);
    if (id > 0) det.id = id;
    else if (id != -1)
      throw ParseError("id must be positive or -1", line_no);

    double left = parse_double(fields[2], line_no);
    double top = parse_double(fields[3], line_no);
    double w = parse_double(fields[4], line_no);
    double h = parse_double(fields[5], line_no);
    if (w <= 0.0 || h <= 0.0) throw ParseError("non-positive box", line_no);
    det.box = BBox{left + 0.5 * w, top + 0.5 * h, w, h};

    det.conf = parse_double(fields[6], line_no);
    if (det.conf < 0.0 || det.conf > 1.0)
      throw ParseError("confidence outside [0,1]", line_no);

    by_frame[det.frame].push_back(det);
  }

  std::vector<FrameDetections> out;
  out.reserve(by_frame.size());
  for (auto& [frame, dets] : by_frame) out.push_back({frame, std::move(dets)});
  return out;
}

std::vector<FrameDetections> parse_mot_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_mot_file(in);
}

std::vector<FrameDetections> load_mot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return parse_mot_file(in);
}

namespace {

struct MotLine {
  int frame;
  std::int64_t id;
  const BBox* box;
};

void format_line(std::ostream& out, int frame, std::int64_t id, const BBox& box,
                 const char* conf_field) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d,%lld,%.2f,%.2f,%.2f,%.2f,%s,-1,-1,-1\n", frame,
                static_cast<long long>(id), box.left(), box.top(), box.w, box.h,
                conf_field);
  out << buf;
}

}  // namespace

void write_mot_file(const std::vector<Tracklet>& tracks, std::ostream& out) {
  std::vector<MotLine> lines;
  for (const auto& tr : tracks) {
    if (tr.history.empty())
      throw std::invalid_argument("tracklet " + std::to_string(tr.id) +
                                  " has no history");
    if (tr.id <= 0)
      throw std::invalid_argument("tracklet id must be positive");
    for (const auto& [frame, box] : tr.history) lines.push_back({frame, tr.id, &box});
  }
  std::sort(lines.begin(), lines.end(), [](const MotLine& a, const MotLine& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });
  for (const auto& l : lines) format_line(out, l.frame, l.id, *l.box, "1");
}

std::string write_mot_to_string(const std::vector<Tracklet>& tracks) {
  std::ostringstream out;
  write_mot_file(tracks, out);
  return out.str();
}

void save_mot_file(const std::vector<Tracklet>& tracks, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  write_mot_file(tracks, out);
}

void write_det_file(const std::vector<FrameDetections>& frames, std::ostream& out) {
  for (const auto& fd : frames) {
    for (const auto& det : fd.detections) {
      char conf[32];
      std::snprintf(conf, sizeof(conf), "%.2f", det.conf);
      format_line(out, fd.frame, det.id ? *det.id : -1, det.box, conf);
    }
  }
}

void save_det_file(const std::vector<FrameDetections>& frames, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  write_det_file(frames, out);
}

DisplacementSidecar parse_displacement_sidecar(std::istream& in) {
  DisplacementSidecar map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_blank(line) || line.front() == '#') continue;

    auto fields = split_csv(line);
    if (fields.size() != 4)
      throw ParseError("expected 4 fields 'frame,det_index,dx,dy'", line_no);
    int frame = static_cast<int>(parse_int(fields[0], line_no));
    int index = static_cast<int>(parse_int(fields[1], line_no));
    double dx = parse_double(fields[2], line_no);
    double dy = parse_double(fields[3], line_no);
    auto [it, inserted] = map.emplace(std::make_pair(frame, index), Vec2(dx, dy));
    if (!inserted) throw ParseError("duplicate displacement", line_no);
  }
  return map;
}

DisplacementSidecar parse_displacement_sidecar_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_displacement_sidecar(in);
}

DisplacementSidecar load_displacement_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return parse_displacement_sidecar(in);
}

void write_displacement_sidecar(const DisplacementSidecar& sidecar, std::ostream& out) {
  out << "# frame,det_index,dx,dy\n";
  for (const auto& [key, v] : sidecar) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.4f,%.4f\n", key.first, key.second, v.x(),
                  v.y());
    out << buf;
  }
}

std::vector<Detection> filter_by_confidence(const std::vector<Detection>& dets,
                                            double tau) {
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in [0,1]");
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const auto& det : dets)
    if (det.conf >= tau) kept.push_back(det);
  return kept;
}

std::string to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::kCycle: return "cycle";
    case FusionMode::kSortOnly: return "sort_only";
    case FusionMode::kCtOnly: return "ct_only";
  }
  return "cycle";
}

FusionMode fusion_mode_from_string(const std::string& name) {
  if (name == "cycle") return FusionMode::kCycle;
  if (name == "sort_only") return FusionMode::kSortOnly;
  if (name == "ct_only") return FusionMode::kCtOnly;
  throw std::invalid_argument("unknown fusion mode: " + name);
}

}  // namespace cycletrack
