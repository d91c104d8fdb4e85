#include "cycletrack/frames_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cycletrack {
namespace {

// Minimal extractor for the fixed header schema this module writes.
long header_field(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  const std::size_t at = text.find(needle);
  if (at == std::string::npos)
    throw std::runtime_error("frames header missing field: " + key);
  std::size_t pos = text.find(':', at);
  if (pos == std::string::npos) throw std::runtime_error("malformed frames header");
  ++pos;
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  return std::stol(text.substr(pos));
}

}  // namespace

FramesWriter::FramesWriter(const std::string& basename) : basename_(basename) {
  FILE* f = std::fopen((basename_ + ".bin").c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write file: " + basename_ + ".bin");
  file_ = f;
}

FramesWriter::~FramesWriter() {
  try {
    close();
  } catch (...) {
  }
}

void FramesWriter::append(const Heatmap& frame) {
  if (closed_) throw std::logic_error("writer already closed");
  if (count_ == 0) {
    width_ = frame.width;
    height_ = frame.height;
  } else if (frame.width != width_ || frame.height != height_) {
    throw std::invalid_argument("frame size changed mid-stream");
  }
  std::vector<float> row(frame.values.size());
  for (std::size_t i = 0; i < frame.values.size(); ++i)
    row[i] = static_cast<float>(frame.values[i]);
  if (std::fwrite(row.data(), sizeof(float), row.size(), static_cast<FILE*>(file_)) !=
      row.size())
    throw std::runtime_error("short write to " + basename_ + ".bin");
  ++count_;
}

void FramesWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (file_) {
    std::fclose(static_cast<FILE*>(file_));
    file_ = nullptr;
  }
  std::ofstream header(basename_ + ".json");
  if (!header) throw std::runtime_error("cannot write file: " + basename_ + ".json");
  header << "{\"width\": " << width_ << ", \"height\": " << height_
         << ", \"frames\": " << count_ << ", \"dtype\": \"float32\"}\n";
}

Heatmap FramesFile::frame(int index_1based) const {
  if (index_1based < 1 || index_1based > count)
    throw std::out_of_range("frame index outside file");
  Heatmap map;
  map.width = width;
  map.height = height;
  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  map.values.resize(pixels);
  const std::size_t offset = static_cast<std::size_t>(index_1based - 1) * pixels;
  for (std::size_t i = 0; i < pixels; ++i)
    map.values[i] = static_cast<double>(data[offset + i]);
  return map;
}

std::vector<Heatmap> FramesFile::all() const {
  std::vector<Heatmap> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (int t = 1; t <= count; ++t) frames.push_back(frame(t));
  return frames;
}

FramesFile load_frames(const std::string& basename) {
  std::ifstream header(basename + ".json");
  if (!header) throw std::runtime_error("cannot open file: " + basename + ".json");
  std::ostringstream text;
  text << header.rdbuf();
  const std::string json = text.str();
  if (json.find("\"float32\"") == std::string::npos)
    throw std::runtime_error("unsupported frames dtype");

  FramesFile file;
  file.width = static_cast<int>(header_field(json, "width"));
  file.height = static_cast<int>(header_field(json, "height"));
  file.count = static_cast<int>(header_field(json, "frames"));
  if (file.width <= 0 || file.height <= 0 || file.count < 0)
    throw std::runtime_error("malformed frames header");

  std::ifstream bin(basename + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open file: " + basename + ".bin");
  const std::size_t total =
      static_cast<std::size_t>(file.width) * file.height * file.count;
  file.data.resize(total);
  bin.read(reinterpret_cast<char*>(file.data.data()),
           static_cast<std::streamsize>(total * sizeof(float)));
  if (static_cast<std::size_t>(bin.gcount()) != total * sizeof(float))
    throw std::runtime_error("frames binary shorter than header promises");
  return file;
}

}  // namespace cycletrack
