#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "droplet/geometry.hpp"

namespace droplet {

// h(theta_i) on the uniform grid theta_i = 2 pi i / n, for a convex set given relative to `origin`.
struct SupportFunction {
  std::vector<double> h;
  Point origin{};

  int size() const { return static_cast<int>(h.size()); }
  double step() const { return 2.0 * std::numbers::pi / static_cast<double>(h.size()); }
  double theta(int i) const { return step() * i; }

  static SupportFunction sample(int n, const std::function<double(double)>& f, Point origin = {}) {
    SupportFunction s;
    s.origin = origin;
    s.h.resize(n);
    for (int i = 0; i < n; ++i) s.h[i] = f(2.0 * std::numbers::pi * i / n);
    return s;
  }

  static SupportFunction circle(int n, double r) {
    return sample(n, [r](double) { return r; });
  }

  static SupportFunction of_points(int n, const Polyline& pts) {
    return sample(n, [&](double t) {
      const Point v{std::cos(t), std::sin(t)};
      double m = -std::numeric_limits<double>::infinity();
      for (Point p : pts) m = std::max(m, dot(p, v));
      return m;
    });
  }

  double max() const { return *std::max_element(h.begin(), h.end()); }
  double min() const { return *std::min_element(h.begin(), h.end()); }
};

// h'' + h by the 3-point stencil that is exact on constants and first harmonics, so translations
// and flat sides give exactly zero up to rounding.
inline std::vector<double> radius_of_curvature(const SupportFunction& s) {
  const int n = s.size();
  const double c = std::cos(s.step()), inv = 1.0 / (2.0 * (1.0 - c));
  std::vector<double> rho(n);
  for (int i = 0; i < n; ++i) {
    const double hp = s.h[(i + 1) % n], hm = s.h[(i + n - 1) % n];
    rho[i] = (hp + hm - 2.0 * c * s.h[i]) * inv;
  }
  return rho;
}

// Radii below this fraction of max |h| count as zero: flat sides and corners are rejected.
inline constexpr double kFlatRadius = 1e-9;

inline std::vector<double> curvature_from_support(const SupportFunction& s) {
  auto rho = radius_of_curvature(s);
  double scale = 0.0;
  for (double v : s.h) scale = std::max(scale, std::abs(v));
  for (double& r : rho) {
    if (!(r > kFlatRadius * scale)) throw std::domain_error("non-convex support function");
    r = 1.0 / r;
  }
  return rho;
}

inline bool strictly_convex(const SupportFunction& s) {
  for (double r : radius_of_curvature(s))
    if (!(r > 0.0)) return false;
  return true;
}

// Area = (1/2) int h (h'' + h) dtheta, summed with the same stencil.
inline double support_area(const SupportFunction& s) {
  const auto rho = radius_of_curvature(s);
  double a = 0.0;
  for (int i = 0; i < s.size(); ++i) a += s.h[i] * rho[i];
  return 0.5 * a * s.step();
}

// Perimeter = int h dtheta.
inline double support_length(const SupportFunction& s) {
  double l = 0.0;
  for (double v : s.h) l += v;
  return l * s.step();
}

// Width in direction theta plus width in theta + pi, maximised; n must be even.
inline double support_diameter(const SupportFunction& s) {
  const int n = s.size();
  double d = 0.0;
  for (int i = 0; i < n / 2; ++i) d = std::max(d, s.h[i] + s.h[i + n / 2]);
  return d;
}

struct ConvexCurve {
  Polyline points;
  double closure_defect = 0.0;
};

// x(theta) = h(0) - int_0^theta sin(s) / k(s) ds, y(theta) = h(pi/2) + int_{pi/2}^theta cos(s) / k(s) ds,
// by the cumulative trapezoid rule; n must be a multiple of 4.
inline ConvexCurve curve_from_support(const SupportFunction& s) {
  const int n = s.size();
  if (n % 4 != 0) throw std::invalid_argument("curve_from_support: grid size must be a multiple of 4");
  const auto rho = radius_of_curvature(s);
  for (double r : rho)
    if (!(r > 0.0)) throw std::domain_error("non-convex support function");
  const double d = s.step();
  std::vector<double> fx(n + 1), fy(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = d * i;
    fx[i] = std::sin(t) * rho[i % n];
    fy[i] = std::cos(t) * rho[i % n];
  }
  std::vector<double> ix(n + 1, 0.0), iy(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    ix[i] = ix[i - 1] + 0.5 * d * (fx[i - 1] + fx[i]);
    iy[i] = iy[i - 1] + 0.5 * d * (fy[i - 1] + fy[i]);
  }
  const int q = n / 4;
  ConvexCurve c;
  c.points.resize(n);
  for (int i = 0; i < n; ++i)
    c.points[i] = {s.origin.x + s.h[0] - ix[i], s.origin.y + s.h[q] + (iy[i] - iy[q])};
  const Point end{s.origin.x + s.h[0] - ix[n], s.origin.y + s.h[q] + (iy[n] - iy[q])};
  c.closure_defect = norm(end - c.points[0]);
  return c;
}

// The convex polygon {p : p . v(theta_i) <= h_i} (relative to the origin), possibly empty.
inline ConvexPolygon polygon_from_support(const SupportFunction& s) {
  std::vector<double> angles(s.size());
  for (int i = 0; i < s.size(); ++i) angles[i] = s.theta(i);
  return halfplane_intersection(angles, s.h);
}

struct DilatedRegion {
  SupportFunction support;
  bool empty = false;
};

// Minkowski dilation (delta > 0) or erosion (delta < 0) of a convex set.
inline DilatedRegion region_dilate_erode(const SupportFunction& s, double delta) {
  DilatedRegion r{s, false};
  if (delta >= 0.0) {
    for (double& v : r.support.h) v += delta;
    return r;
  }
  SupportFunction shrunk = s;
  for (double& v : shrunk.h) v += delta;
  const ConvexPolygon poly = polygon_from_support(shrunk);
  if (poly.empty() || poly.area() < 1e-14) {
    r.empty = true;
    r.support.h.assign(s.h.size(), 0.0);
    return r;
  }
  for (int i = 0; i < s.size(); ++i) r.support.h[i] = poly.support({std::cos(s.theta(i)), std::sin(s.theta(i))});
  return r;
}

// max_theta (p . v(theta) - h(theta)): distance to the set outside, minus the depth inside.
inline double signed_distance(const SupportFunction& s, Point p) {
  const Point q = p - s.origin;
  double m = -std::numeric_limits<double>::infinity();
  const double d = s.step();
  for (int i = 0; i < s.size(); ++i) m = std::max(m, q.x * std::cos(d * i) + q.y * std::sin(d * i) - s.h[i]);
  return m;
}

// signed_distance with the direction table computed once.
class SupportDistance {
 public:
  explicit SupportDistance(const SupportFunction& s) : h_(s.h), origin_(s.origin) {
    c_.resize(s.h.size());
    sn_.resize(s.h.size());
    for (int i = 0; i < s.size(); ++i) {
      c_[i] = std::cos(s.theta(i));
      sn_[i] = std::sin(s.theta(i));
    }
  }

  double operator()(Point p) const {
    const Point q = p - origin_;
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h_.size(); ++i) m = std::max(m, q.x * c_[i] + q.y * sn_[i] - h_[i]);
    return m;
  }

 private:
  std::vector<double> h_, c_, sn_;
  Point origin_;
};

// Largest inscribed radius about the origin.
inline double inradius(const SupportFunction& s) { return std::max(0.0, s.min()); }

}  // namespace droplet
