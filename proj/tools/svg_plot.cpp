#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cycletrack::plot {
namespace {

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  double span() const { return hi - lo; }
};

Range nice_range(double lo, double hi) {
  if (!(hi > lo)) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string fmt_num(double v) {
  char buf[32];
  if (std::abs(v) >= 1000.0 || v == std::floor(v))
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  else if (std::abs(v) >= 1.0)
    std::snprintf(buf, sizeof(buf), "%.2f", v);
  else
    std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Figure& figure) {
  const int W = figure.width, H = figure.height;
  const int ml = 64, mr = 20, mt = 36, mb = figure.caption.empty() ? 52 : 76;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : figure.series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  const Range xr = nice_range(xmin, xmax);
  const Range yr = nice_range(ymin, ymax);

  auto px = [&](double x) { return ml + (x - xr.lo) / xr.span() * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - yr.lo) / yr.span() * (H - mt - mb); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">"
      << figure.title << "</text>\n";

  // Axes and grid.
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double xstep = nice_step(xr.span(), 8);
  for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + 1e-9; x += xstep) {
    out << "<line x1=\"" << px(x) << "\" y1=\"" << mt << "\" x2=\"" << px(x) << "\" y2=\""
        << H - mb << "\" stroke=\"#e5e5e5\"/>\n";
    out << "<text x=\"" << px(x) << "\" y=\"" << H - mb + 16
        << "\" text-anchor=\"middle\">" << fmt_num(x) << "</text>\n";
  }
  const double ystep = nice_step(yr.span(), 6);
  for (double y = std::ceil(yr.lo / ystep) * ystep; y <= yr.hi + 1e-9; y += ystep) {
    out << "<line x1=\"" << ml << "\" y1=\"" << py(y) << "\" x2=\"" << W - mr << "\" y2=\""
        << py(y) << "\" stroke=\"#e5e5e5\"/>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\">" << fmt_num(y) << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
      << "\" height=\"" << H - mt - mb
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

  // Axis labels.
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - mb + 34
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << figure.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">" << figure.y_label
      << "</text>\n";

  // Series.
  for (const auto& s : figure.series) {
    if (s.points.empty()) continue;
    if (s.scatter) {
      out << "<g fill=\"" << s.color << "\">\n";
      for (const auto& [x, y] : s.points)
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\"/>\n";
      out << "</g>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) out << px(x) << ',' << py(y) << ' ';
      out << "\"/>\n";
    }
  }

  // Legend.
  double lx = ml + 10, ly = mt + 14;
  for (const auto& s : figure.series) {
    if (s.label.empty()) continue;
    out << "<rect x=\"" << lx << "\" y=\"" << ly - 9 << "\" width=\"14\" height=\"4\" fill=\""
        << s.color << "\"/>\n";
    out << "<text x=\"" << lx + 20 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 16;
  }

  if (!figure.caption.empty())
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
        << "fill=\"#555\">" << figure.caption << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

void save_svg(const Figure& figure, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << render_svg(figure);
}

}  // namespace cycletrack::plot
