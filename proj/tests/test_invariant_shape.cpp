#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "droplet/invariant_shape.hpp"
#include "droplet/anisotropy.hpp"
#include "oracles.hpp"

using namespace droplet;

namespace {
const double kAlpha = solve_alpha(1e-14);
}

TEST(Alpha, ResidualSignsAndRoot) {
  EXPECT_LT(alpha_residual(1e-9), 0.0);
  EXPECT_GT(alpha_residual(4.0), 0.0);
  EXPECT_GT(kAlpha, 0.0);
  EXPECT_LE(std::abs(alpha_residual(kAlpha)), 1e-12);
}

TEST(Alpha, QuadratureAgreesWithSeries) {
  for (double x : {0.1, 0.4, kHalfSqrt2, -0.5})
    EXPECT_NEAR(gauss_integral(x, kAlpha), oracle::gauss_integral_series(x, kAlpha), 1e-14);
  // Root of the series-based residual.
  auto res = [](double a) { return 4 * std::numbers::sqrt2 * a * std::exp(-a) * oracle::gauss_integral_series(kHalfSqrt2, a) - 1; };
  double lo = 0.1, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (res(m) < 0 ? lo : hi) = m;
  }
  EXPECT_NEAR(kAlpha, 0.5 * (lo + hi), 1e-12);
}

TEST(Alpha, AreaIdentity) {
  const InvariantShape s(kAlpha);
  EXPECT_NEAR(kAlpha * s.area(), 1.0, 1e-10);
  EXPECT_NEAR(kAlpha * s.polygon_area(), 1.0, 1e-6);
}

TEST(F0, EndpointsAndCentre) {
  EXPECT_NEAR(f0(0.0, kAlpha), std::numbers::sqrt2 * std::exp(-kAlpha), 1e-15);
  EXPECT_NEAR(f0(kHalfSqrt2, kAlpha), kHalfSqrt2, 1e-10);
  EXPECT_NEAR(f0(-kHalfSqrt2, kAlpha), kHalfSqrt2, 1e-10);
  EXPECT_THROW(f0(0.8, kAlpha), std::domain_error);
}

TEST(F0, EndpointSlopesByFiniteDifferences) {
  const double h = 1e-5, e = kHalfSqrt2;
  EXPECT_NEAR((f0(-e + h, kAlpha) - f0(-e, kAlpha)) / h - 0.5 * h * f0_second(-e, kAlpha), 1.0, 1e-6);
  EXPECT_NEAR((f0(e, kAlpha) - f0(e - h, kAlpha)) / h + 0.5 * h * f0_second(e, kAlpha), -1.0, 1e-6);
  EXPECT_NEAR(f0_prime(-e, kAlpha), 1.0, 1e-10);
}

TEST(F0, ConcaveEvenPositive) {
  double prev2 = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -kHalfSqrt2 + 2 * kHalfSqrt2 * i / 1000;
    EXPECT_GT(f0(x, kAlpha), 0.0);
    EXPECT_NEAR(f0(x, kAlpha), f0(-x, kAlpha), 1e-14);
    if (i >= 2) {
      const double x0 = x - 2 * kHalfSqrt2 * 2 / 1000, x1 = x - 2 * kHalfSqrt2 / 1000;
      EXPECT_LE(f0(x, kAlpha) + f0(x0, kAlpha) - 2 * f0(x1, kAlpha), 0.0);
    }
    (void)prev2;
  }
}

TEST(Ode, ResidualOnGrid) {
  std::vector<double> grid;
  for (int i = 1; i < 1000; ++i) grid.push_back(-kHalfSqrt2 + 2 * kHalfSqrt2 * i / 1000);
  EXPECT_LE(verify_invariant_ode(kAlpha, grid), 1e-8);
  EXPECT_NEAR(f0_second(0.0, kAlpha), -4 * kAlpha * f0(0.0, kAlpha), 1e-14);
}

TEST(Ode, OtherAlphaFailsBoundaryCondition) {
  for (double a : {0.9 * kAlpha, 1.1 * kAlpha}) EXPECT_GT(std::abs(f0_prime(-kHalfSqrt2, a) - 1.0), 1e-3);
}

TEST(Shape, AxisPointsOnBoundary) {
  const InvariantShape s(kAlpha);
  for (Point p : {Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}}) {
    double d = 1e9;
    for (Point q : s.boundary()) d = std::min(d, norm(p - q));
    EXPECT_LT(d, 1e-8);
  }
  EXPECT_NEAR(s.support(0.0), 1.0, 1e-12);
  EXPECT_NEAR(s.support(std::numbers::pi / 2), 1.0, 1e-12);
}

TEST(Shape, PoleCurvature) {
  const InvariantShape s(kAlpha);
  EXPECT_NEAR(s.curvature(std::numbers::pi / 2), 2 * kAlpha, 1e-4);
  // Same value from the second derivative of the boundary graph over the x-axis near (0, 1).
  const double x = -kHalfSqrt2;
  EXPECT_NEAR(f0_second(x, kAlpha) / (2 * std::numbers::sqrt2), -2 * kAlpha, 1e-10);
}

TEST(Shape, SupportSymmetries) {
  const InvariantShape s(kAlpha);
  const auto h = s.support_function(1024);
  for (int i = 0; i < 1024; ++i) {
    EXPECT_NEAR(h.h[i], h.h[(i + 256) % 1024], 1e-8);
    EXPECT_NEAR(h.h[i], s.support(h.theta(i)), 1e-12);
  }
}

TEST(Shape, SupportAgreesWithBoundarySamples) {
  const InvariantShape s(kAlpha);
  const auto sampled = SupportFunction::of_points(256, s.boundary());
  for (int i = 0; i < 256; ++i) EXPECT_NEAR(sampled.h[i], s.support(sampled.theta(i)), 1e-7);
}

TEST(Shape, CurveFromSupportMatchesBoundary) {
  const InvariantShape s(kAlpha);
  const auto h = s.support_function(2048);
  const auto curve = curve_from_support(h);
  double err = 0;
  for (int i = 0; i < h.size(); ++i) {
    const double th = h.theta(i);
    const Point p = s.frame_point(s.abscissa_for_normal(InvariantShape::fold(th)));
    const double c = std::cos(th), sn = std::sin(th);
    const Point exact{std::abs(c) < 1e-12 ? 0.0 : std::copysign(p.x, c), std::abs(sn) < 1e-12 ? 0.0 : std::copysign(p.y, sn)};
    err = std::max(err, norm(curve.points[i] - exact));
  }
  EXPECT_LT(err, 1e-4);
}

TEST(Shape, CurvatureLipschitzWithKinksAtPoles) {
  const InvariantShape s(kAlpha);
  const int n = 4096;
  const double d = 2 * std::numbers::pi / n;
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = s.curvature(d * i);
  double lip = 0, kmin = 1e9;
  for (int i = 0; i < n; ++i) {
    lip = std::max(lip, std::abs(k[(i + 1) % n] - k[i]) / d);
    kmin = std::min(kmin, k[i]);
  }
  EXPECT_GT(kmin, 0.1);
  EXPECT_LT(lip, 10.0);
  // One-sided slopes at the pole pi/2 differ: the derivative jumps.
  const int p = n / 4;
  const double right = (k[p + 1] - k[p]) / d, left = (k[p] - k[p - 1]) / d;
  EXPECT_GT(std::abs(right - left), 0.05);
  // Identity a k = alpha h for the scale-invariant profile.
  for (int i = 0; i < n; i += 37) EXPECT_NEAR(anisotropy(d * i) * k[i], kAlpha * s.support(d * i), 1e-8);
}

TEST(Shape, Membership) {
  const InvariantShape s(kAlpha);
  EXPECT_TRUE(s.contains({0, 0}));
  EXPECT_TRUE(s.contains({0.99, 0}));
  EXPECT_FALSE(s.contains({1.01, 0}));
  EXPECT_TRUE(s.contains({0.7, 0.7}));
  EXPECT_FALSE(s.contains({0.78, 0.78}));
}
