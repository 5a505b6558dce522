#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace droplet {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

using Polyline = std::vector<Point>;

struct Segment {
  Point a;
  Point b;
};

inline double distance_to_segment(Point p, const Segment& s) {
  const Point d = s.b - s.a;
  const double len2 = dot(d, d);
  double u = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return norm(p - (s.a + u * d));
}

// Signed shoelace area; positive for counter-clockwise loops.
inline double signed_area(const Polyline& loop) {
  double a = 0.0;
  for (std::size_t i = 0, n = loop.size(); i < n; ++i) a += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * a;
}

inline double perimeter(const Polyline& loop) {
  double s = 0.0;
  for (std::size_t i = 0, n = loop.size(); i < n; ++i) s += norm(loop[(i + 1) % n] - loop[i]);
  return s;
}

// Even-odd point-in-polygon over a set of loops.
inline bool inside_loops(Point p, const std::vector<Polyline>& loops) {
  bool in = false;
  for (const auto& loop : loops) {
    for (std::size_t i = 0, n = loop.size(), j = n - 1; i < n; j = i++) {
      const Point a = loop[i], b = loop[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < xc) in = !in;
      }
    }
  }
  return in;
}

struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
  bool contains(Point p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

inline Rect bounds_of(const std::vector<Polyline>& loops) {
  Rect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& loop : loops)
    for (Point p : loop) {
      r.xmin = std::min(r.xmin, p.x);
      r.ymin = std::min(r.ymin, p.y);
      r.xmax = std::max(r.xmax, p.x);
      r.ymax = std::max(r.ymax, p.y);
    }
  return r;
}

// Convex polygon with counter-clockwise vertices.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(Polyline ccw) : v_(std::move(ccw)) {}

  const Polyline& vertices() const { return v_; }
  bool empty() const { return v_.size() < 3 || area() <= 0.0; }
  double area() const { return v_.size() < 3 ? 0.0 : signed_area(v_); }

  // O(log n) membership, boundary included up to eps.
  bool contains(Point p, double eps = 1e-12) const {
    const std::size_t n = v_.size();
    if (n < 3) return false;
    const Point o = v_[0];
    if (cross(v_[1] - o, p - o) < -eps || cross(v_[n - 1] - o, p - o) > eps) return false;
    std::size_t lo = 1, hi = n - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (cross(v_[mid] - o, p - o) >= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return cross(v_[hi] - v_[lo], p - v_[lo]) >= -eps;
  }

  double support(Point dir) const {
    double h = -std::numeric_limits<double>::infinity();
    for (Point p : v_) h = std::max(h, dot(p, dir));
    return h;
  }

 private:
  Polyline v_;
};

// Intersection of half-planes {p : p·n_i <= c_i} with normals at strictly increasing angles
// covering the full circle. Returns an empty polygon when the intersection is empty or degenerate.
inline ConvexPolygon halfplane_intersection(const std::vector<double>& angles, const std::vector<double>& offsets) {
  struct Line {
    Point n;
    double c;
    Point point() const { return c * n; }
    Point dir() const { return {-n.y, n.x}; }
  };
  const std::size_t m = angles.size();
  if (m < 3) return {};
  std::vector<Line> lines(m);
  for (std::size_t i = 0; i < m; ++i) lines[i] = {{std::cos(angles[i]), std::sin(angles[i])}, offsets[i]};

  auto intersect = [](const Line& a, const Line& b, Point& out) {
    const double det = a.n.x * b.n.y - a.n.y * b.n.x;
    if (std::abs(det) < 1e-300) return false;
    out = {(a.c * b.n.y - a.n.y * b.c) / det, (a.n.x * b.c - a.c * b.n.x) / det};
    return true;
  };
  auto outside = [](const Line& l, Point p) { return dot(l.n, p) > l.c + 1e-12 * (1.0 + std::abs(l.c)); };

  std::vector<Line> dq(m + 2);
  std::vector<Point> pts(m + 2);
  std::size_t head = 0, tail = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Line& l = lines[i];
    while (tail - head >= 2 && outside(l, pts[tail - 2])) --tail;
    while (tail - head >= 2 && outside(l, pts[head])) ++head;
    dq[tail] = l;
    if (tail - head >= 1) {
      if (cross(dq[tail - 1].dir(), l.dir()) <= 0.0) {
        // Parallel or turning back: keep the tighter one when parallel.
        if (dot(dq[tail - 1].n, l.n) > 0.0) {
          if (l.c < dq[tail - 1].c) dq[tail - 1] = l;
          if (tail - head >= 2 && !intersect(dq[tail - 2], dq[tail - 1], pts[tail - 2])) return {};
          continue;
        }
        return {};
      }
      if (!intersect(dq[tail - 1], l, pts[tail - 1])) return {};
    }
    ++tail;
  }
  while (tail - head >= 3 && outside(dq[head], pts[tail - 2])) --tail;
  while (tail - head >= 3 && outside(dq[tail - 1], pts[head])) ++head;
  if (tail - head < 3) return {};
  Polyline poly;
  for (std::size_t i = head; i + 1 < tail; ++i) poly.push_back(pts[i]);
  Point last;
  if (!intersect(dq[tail - 1], dq[head], last)) return {};
  poly.push_back(last);
  // Drop coincident vertices produced by redundant constraints.
  Polyline clean;
  for (Point p : poly)
    if (clean.empty() || norm(p - clean.back()) > 1e-13) clean.push_back(p);
  while (clean.size() > 1 && norm(clean.front() - clean.back()) <= 1e-13) clean.pop_back();
  ConvexPolygon out(std::move(clean));
  if (out.empty()) return {};
  return out;
}

// A closed planar set given by boundary segments and a membership predicate.
struct PlanarSet {
  std::vector<Segment> boundary;
  std::function<bool(Point)> contains;
  Rect bounds;

  static PlanarSet from_loops(std::vector<Polyline> loops) {
    PlanarSet s;
    for (const auto& loop : loops)
      for (std::size_t i = 0, n = loop.size(); i < n; ++i) s.boundary.push_back({loop[i], loop[(i + 1) % n]});
    s.bounds = bounds_of(loops);
    s.contains = [loops = std::move(loops)](Point p) { return inside_loops(p, loops); };
    return s;
  }

  static PlanarSet from_convex(const ConvexPolygon& poly) {
    PlanarSet s = from_loops({poly.vertices()});
    s.contains = [poly](Point p) { return poly.contains(p, 1e-12); };
    return s;
  }

  bool empty() const { return boundary.empty(); }

  double distance(Point p) const {
    if (contains(p)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& seg : boundary) d = std::min(d, distance_to_segment(p, seg));
    return d;
  }
};

// sup_{a in A} dist(a, B), sampled at the given spatial resolution.
inline double directed_hausdorff(const PlanarSet& a, const PlanarSet& b, double resolution) {
  double best = 0.0;
  for (const auto& seg : a.boundary) {
    const double len = norm(seg.b - seg.a);
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int i = 0; i <= n; ++i) best = std::max(best, b.distance(seg.a + (static_cast<double>(i) / n) * (seg.b - seg.a)));
  }
  // Interior points of A outside B; the far point can be interior when B has holes.
  const Rect r = a.bounds;
  for (double y = r.ymin + 0.5 * resolution; y < r.ymax; y += resolution)
    for (double x = r.xmin + 0.5 * resolution; x < r.xmax; x += resolution) {
      const Point p{x, y};
      if (a.contains(p) && !b.contains(p)) best = std::max(best, b.distance(p));
    }
  return best;
}

inline double hausdorff_distance(const PlanarSet& a, const PlanarSet& b, double resolution) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty input");
  return std::max(directed_hausdorff(a, b, resolution), directed_hausdorff(b, a, resolution));
}

}  // namespace droplet
