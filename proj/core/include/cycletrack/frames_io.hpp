#pragma once

#include <string>
#include <vector>

#include "cycletrack/heatmap.hpp"

namespace cycletrack {

// Rendered frames on disk: a JSON header describing the grid
// ({"width": W, "height": H, "frames": N, "dtype": "float32"}) next to a raw
// binary file of frame-major, row-major float32 samples.

/// Streams frames to <basename>.bin and finalizes <basename>.json on close.
class FramesWriter {
public:
  explicit FramesWriter(const std::string& basename);
  ~FramesWriter();
  FramesWriter(const FramesWriter&) = delete;
  FramesWriter& operator=(const FramesWriter&) = delete;

  void append(const Heatmap& frame);
  void close();

private:
  std::string basename_;
  int width_ = 0;
  int height_ = 0;
  int count_ = 0;
  bool closed_ = false;
  void* file_ = nullptr;  // FILE*
};

struct FramesFile {
  int width = 0;
  int height = 0;
  int count = 0;
  std::vector<float> data;  // frame-major

  Heatmap frame(int index_1based) const;
  std::vector<Heatmap> all() const;
};

/// Loads <basename>.json + <basename>.bin written by FramesWriter.
FramesFile load_frames(const std::string& basename);

}  // namespace cycletrack
