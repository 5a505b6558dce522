#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "droplet/geometry.hpp"
#include "droplet/spin_configuration.hpp"
#include "droplet/support_function.hpp"

namespace droplet::io {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs of '-' sites per row: columns y, x_start, length (site coordinates).
inline std::string rle_csv(const SpinConfiguration& c) {
  std::string out = "y,x_start,length\n";
  const Box& b = c.bbox();
  for (int j = b.y0; j < b.y0 + b.height; ++j) {
    int i = b.x0;
    while (i < b.x0 + b.width) {
      if (!c.is_minus({i, j})) {
        ++i;
        continue;
      }
      const int start = i;
      while (i < b.x0 + b.width && c.is_minus({i, j})) ++i;
      out += std::to_string(j) + "," + std::to_string(start) + "," + std::to_string(i - start) + "\n";
    }
  }
  return out;
}

struct SvgPath {
  std::vector<Polyline> loops;
  std::string stroke = "black";
  std::string fill = "none";
  double width = 1.0;
};

// Renders closed paths; y is flipped so the picture is in the usual orientation.
inline std::string svg(const std::vector<SvgPath>& paths, Rect view, double pixels = 600.0) {
  const double w = view.xmax - view.xmin, h = view.ymax - view.ymin;
  const double scale = pixels / std::max(w, h);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w * scale) << "\" height=\"" << num(h * scale)
    << "\" viewBox=\"0 0 " << num(w * scale) << " " << num(h * scale) << "\">\n";
  for (const auto& p : paths) {
    s << "<path fill-rule=\"evenodd\" fill=\"" << p.fill << "\" stroke=\"" << p.stroke << "\" stroke-width=\""
      << num(p.width) << "\" d=\"";
    for (const auto& loop : p.loops) {
      for (std::size_t i = 0; i < loop.size(); ++i)
        s << (i == 0 ? "M" : "L") << num((loop[i].x - view.xmin) * scale) << " " << num((view.ymax - loop[i].y) * scale)
          << " ";
      s << "Z ";
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

// Support function from a CSV with columns theta,h on a uniform grid starting at 0.
inline SupportFunction read_support_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> th, h;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double a, b;
    if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) != 2) continue;  // header
    th.push_back(a);
    h.push_back(b);
  }
  if (h.size() < 8) throw std::runtime_error("support file has too few rows: " + path.string());
  const double d = 2.0 * std::numbers::pi / static_cast<double>(h.size());
  for (std::size_t i = 0; i < th.size(); ++i)
    if (std::abs(th[i] - d * i) > 1e-9) throw std::runtime_error("support file is not on a uniform grid from 0");
  return SupportFunction{h, {}};
}

}  // namespace droplet::io
