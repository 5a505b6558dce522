#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "droplet/geometry.hpp"
#include "droplet/support_function.hpp"

namespace droplet {

inline constexpr double kHalfSqrt2 = 0.70710678118654752440;  // 1/sqrt(2)

// I(x) = int_0^x exp(2 alpha t^2) dt.
inline double gauss_integral(double x, double alpha) {
  using boost::math::quadrature::gauss_kronrod;
  if (x == 0.0) return 0.0;
  return gauss_kronrod<double, 31>::integrate([alpha](double t) { return std::exp(2.0 * alpha * t * t); }, 0.0, x,
                                              10, 1e-12);
}

// 4 sqrt(2) alpha e^{-alpha} I(1/sqrt(2)) - 1.
inline double alpha_residual(double alpha) {
  return 4.0 * std::numbers::sqrt2 * alpha * std::exp(-alpha) * gauss_integral(kHalfSqrt2, alpha) - 1.0;
}

// Positive root of alpha_residual: bracket by doubling from 1/16, then bisect.
inline double solve_alpha(double tolerance = 1e-13) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solve_alpha: tolerance must be positive");
  double lo = 1.0 / 16.0;
  if (alpha_residual(lo) >= 0.0) throw std::runtime_error("solve_alpha: bracket search failed");
  double hi = lo;
  for (int i = 0; i < 20 && alpha_residual(hi) <= 0.0; ++i) hi *= 2.0;
  if (alpha_residual(hi) <= 0.0) throw std::runtime_error("solve_alpha: bracket search failed");
  lo = hi / 2.0;
  while (alpha_residual(lo) > 0.0) lo /= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = alpha_residual(mid);
    if (r == 0.0) return mid;
    (r < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-3 * tolerance) break;
  }
  const double rl = alpha_residual(lo), rh = alpha_residual(hi);
  return std::abs(rl) < std::abs(rh) ? lo : hi;
}

inline double shape_beta(double alpha) { return -std::numbers::sqrt2 * std::exp(-alpha); }

// f0(x) = beta (4 alpha x I(x) - exp(2 alpha x^2)) on |x| <= 1/sqrt(2).
inline double f0(double x, double alpha) {
  if (std::abs(x) > kHalfSqrt2 * (1.0 + 1e-14)) throw std::domain_error("f0: |x| > 1/sqrt(2)");
  return shape_beta(alpha) * (4.0 * alpha * x * gauss_integral(x, alpha) - std::exp(2.0 * alpha * x * x));
}

inline double f0_prime(double x, double alpha) { return 4.0 * alpha * shape_beta(alpha) * gauss_integral(x, alpha); }

inline double f0_second(double x, double alpha) {
  return 4.0 * alpha * shape_beta(alpha) * std::exp(2.0 * alpha * x * x);
}

// max |f0'' - 4 alpha (-f0 + x f0')| over the grid.
inline double verify_invariant_ode(double alpha, const std::vector<double>& grid) {
  double r = 0.0;
  for (double x : grid)
    r = std::max(r, std::abs(f0_second(x, alpha) - 4.0 * alpha * (-f0(x, alpha) + x * f0_prime(x, alpha))));
  return r;
}

// The scale-invariant droplet. Its boundary in the first quadrant is the graph of f0 in the frame
// f1 = (1, -1)/sqrt(2), f2 = (1, 1)/sqrt(2); the rest follows by reflection in both axes.
class InvariantShape {
 public:
  explicit InvariantShape(double alpha, int samples_per_quarter = 4096) : alpha_(alpha), beta_(shape_beta(alpha)) {
    // First-quadrant arc from (1, 0) to (0, 1): x runs from 1/sqrt(2) down to -1/sqrt(2).
    Polyline arc;
    for (int i = 0; i <= samples_per_quarter; ++i) {
      const double x = kHalfSqrt2 * (1.0 - 2.0 * i / samples_per_quarter);
      arc.push_back(frame_point(x));
    }
    arc.front() = {1.0, 0.0};
    arc.back() = {0.0, 1.0};
    const std::size_t m = arc.size();
    for (std::size_t i = 0; i + 1 < m; ++i) boundary_.push_back(arc[i]);
    for (std::size_t i = 0; i + 1 < m; ++i) boundary_.push_back({-arc[m - 1 - i].x, arc[m - 1 - i].y});
    for (std::size_t i = 0; i + 1 < m; ++i) boundary_.push_back({-arc[i].x, -arc[i].y});
    for (std::size_t i = 0; i + 1 < m; ++i) boundary_.push_back({arc[m - 1 - i].x, -arc[m - 1 - i].y});
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const Polyline& boundary() const { return boundary_; }

  // Point of the first-quadrant arc above frame abscissa x.
  Point frame_point(double x) const {
    const double f = f0(x, alpha_);
    return {(x + f) * kHalfSqrt2, (f - x) * kHalfSqrt2};
  }

  // Area = 2 int (f0 - x f0') dx over [-1/sqrt(2), 1/sqrt(2)].
  double area() const {
    using boost::math::quadrature::gauss_kronrod;
    const double a = alpha_;
    return 2.0 * gauss_kronrod<double, 61>::integrate([a](double x) { return f0(x, a) - x * f0_prime(x, a); },
                                                      -kHalfSqrt2, kHalfSqrt2, 10, 1e-15);
  }

  double polygon_area() const { return signed_area(boundary_); }

  bool contains(Point p) const {
    const double ax = std::abs(p.x), ay = std::abs(p.y);
    const double u = (ax - ay) * kHalfSqrt2, v = (ax + ay) * kHalfSqrt2;
    if (std::abs(u) > kHalfSqrt2) return false;
    return v <= f0(u, alpha_);
  }

  // Frame abscissa of the boundary point with outer normal angle theta in [0, pi/2]:
  // f0'(x) = tan(theta - pi/4).
  double abscissa_for_normal(double theta) const {
    const double target = std::tan(theta - 0.25 * std::numbers::pi);
    double lo = -kHalfSqrt2, hi = kHalfSqrt2;  // f0' decreases from 1 to -1
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f0_prime(mid, alpha_) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  static double fold(double theta) { return std::atan2(std::abs(std::sin(theta)), std::abs(std::cos(theta))); }

  // Exact support function.
  double support(double theta) const {
    const double t = fold(theta);
    const Point p = frame_point(abscissa_for_normal(t));
    return p.x * std::cos(t) + p.y * std::sin(t);
  }

  // Exact curvature of the boundary at outer normal angle theta.
  double curvature(double theta) const {
    const double x = abscissa_for_normal(fold(theta));
    const double d1 = f0_prime(x, alpha_), d2 = f0_second(x, alpha_);
    return std::abs(d2) / std::pow(1.0 + d1 * d1, 1.5);
  }

  SupportFunction support_function(int n) const {
    // Fill one quarter and reflect; n must be a multiple of 4.
    if (n % 4 != 0) throw std::invalid_argument("support_function: grid size must be a multiple of 4");
    SupportFunction s;
    s.h.resize(n);
    const int q = n / 4;
    std::vector<double> quarter(q + 1);
    for (int i = 0; i <= q; ++i) quarter[i] = support(2.0 * std::numbers::pi * i / n);
    for (int i = 0; i < n; ++i) {
      const int r = i % (2 * q);
      s.h[i] = quarter[r <= q ? r : 2 * q - r];
    }
    return s;
  }

  // Largest disc about the centre: min over theta of h(theta).
  double inradius() const {
    double m = support(0.0);
    for (int i = 1; i <= 256; ++i) m = std::min(m, support(0.5 * std::numbers::pi * i / 256));
    return m;
  }

 private:
  double alpha_;
  double beta_;
  Polyline boundary_;
};

inline InvariantShape build_shape(double alpha, int samples_per_quarter = 4096) {
  return InvariantShape(alpha, samples_per_quarter);
}

}  // namespace droplet
