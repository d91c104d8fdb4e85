#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cycletrack/types.hpp"

namespace cycletrack {

// MOTChallenge text interchange:
//   frame,id,bb_left,bb_top,bb_width,bb_height,conf[,x,y,z]
// Boxes are stored top-left in files and center-form in memory. Detection
// files use id = -1 (absent); ground-truth and hypothesis files use id > 0.

/// Detections of one frame, in file order.
struct FrameDetections {
  int frame = 0;
  std::vector<Detection> detections;
};

/// Parses MOT CSV text. Frames are returned sorted ascending; '#'-prefixed
/// and empty lines are ignored. Malformed lines raise ParseError with the
/// 1-based line number.
std::vector<FrameDetections> parse_mot_file(std::istream& in);
std::vector<FrameDetections> parse_mot_from_string(const std::string& text);
std::vector<FrameDetections> load_mot_file(const std::string& path);

/// Writes tracklet histories as MOT lines sorted by (frame, id), boxes with
/// two decimal places, conf fixed to 1. Round-trips through parse_mot_file
/// for values representable with two decimals.
void write_mot_file(const std::vector<Tracklet>& tracks, std::ostream& out);
std::string write_mot_to_string(const std::vector<Tracklet>& tracks);
void save_mot_file(const std::vector<Tracklet>& tracks, const std::string& path);

/// Detection-file writer (id column = -1, conf kept, two decimals).
void write_det_file(const std::vector<FrameDetections>& frames, std::ostream& out);
void save_det_file(const std::vector<FrameDetections>& frames, const std::string& path);

/// Displacement sidecar CSV: "frame,det_index,dx,dy". Missing entries are
/// allowed; duplicate (frame, det_index) keys are an error.
using DisplacementSidecar = std::map<std::pair<int, int>, Vec2>;

DisplacementSidecar parse_displacement_sidecar(std::istream& in);
DisplacementSidecar parse_displacement_sidecar_from_string(const std::string& text);
DisplacementSidecar load_displacement_sidecar(const std::string& path);
void write_displacement_sidecar(const DisplacementSidecar& sidecar, std::ostream& out);

/// Keeps detections with conf >= tau, preserving order.
std::vector<Detection> filter_by_confidence(const std::vector<Detection>& dets, double tau);

}  // namespace cycletrack
