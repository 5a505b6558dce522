#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "droplet/geometry.hpp"
#include "droplet/spin_configuration.hpp"

namespace droplet {

// A bounded closed planar region known through a membership predicate.
struct Region {
  std::string name;
  std::function<bool(Point)> contains;
  Rect extent;
  double area = std::numeric_limits<double>::quiet_NaN();
};

inline Region square_region(double half_side = 0.5) {
  const double s = half_side;
  return {"square", [s](Point p) { return std::abs(p.x) <= s && std::abs(p.y) <= s; }, {-s, -s, s, s}, 4 * s * s};
}

inline Region disk_region(double r = 1.0) {
  return {"disk", [r](Point p) { return p.x * p.x + p.y * p.y <= r * r; }, {-r, -r, r, r}, std::numbers::pi * r * r};
}

inline Region ellipse_region(double a = 2.0, double b = 1.0) {
  return {"ellipse", [a, b](Point p) { return (p.x / a) * (p.x / a) + (p.y / b) * (p.y / b) <= 1.0; },
          {-a, -b, a, b}, std::numbers::pi * a * b};
}

inline Region convex_region(std::string name, const ConvexPolygon& poly) {
  const Rect r = bounds_of({poly.vertices()});
  return {std::move(name), [poly](Point p) { return poly.contains(p, 1e-12); }, r, poly.area()};
}

inline Region empty_region() {
  return {"empty", [](Point) { return false; }, {0, 0, 0, 0}, 0.0};
}

struct Rasterized {
  SpinConfiguration config;
  bool empty = true;
};

// '-' exactly at the sites whose centre lies in L * region; bbox is the bounding rectangle.
inline Rasterized rasterize_droplet(const Region& region, int L) {
  if (L < 1) throw std::invalid_argument("rasterize_droplet: L must be >= 1");
  std::vector<Site> sites;
  if (region.area != 0.0) {
    const int i0 = static_cast<int>(std::floor(L * region.extent.xmin)) - 1;
    const int i1 = static_cast<int>(std::ceil(L * region.extent.xmax)) + 1;
    const int j0 = static_cast<int>(std::floor(L * region.extent.ymin)) - 1;
    const int j1 = static_cast<int>(std::ceil(L * region.extent.ymax)) + 1;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (region.contains({(i + 0.5) / L, (j + 0.5) / L})) sites.push_back({i, j});
  }
  Rasterized r;
  r.empty = sites.empty();
  r.config = SpinConfiguration::from_sites(sites);
  return r;
}

}  // namespace droplet
