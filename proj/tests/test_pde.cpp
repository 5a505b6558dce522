#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "droplet/pde.hpp"
#include "droplet/rng.hpp"
#include "oracles.hpp"

using namespace droplet;

namespace {
double cosine(double x) { return std::cos(std::numbers::pi * x / 2.0); }
double tent(double x) { return 1.0 - std::abs(x); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}
}  // namespace

TEST(Sigma, Values) {
  EXPECT_EQ(sigma(0.0), 0.0);
  EXPECT_EQ(sigma(1.0), 0.5);
  EXPECT_EQ(sigma(-1.0), -0.5);
}

TEST(SineTransform, RoundTrip) {
  CounterStream rng(1);
  for (int n : {2, 3, 17, 256, 1024}) {
    std::vector<double> g(n - 1);
    for (auto& v : g) v = rng.uniform() * 2 - 1;
    EXPECT_LT(sup_diff(inverse_sine_transform(sine_transform(g)), g), 1e-12) << n;
  }
}

TEST(HeatDiscrete, ZeroStaysZero) {
  Grid1D g{0, std::vector<double>(33, 0.0)};
  EXPECT_EQ(heat_solve_discrete(g, 3.0).values, g.values);
}

TEST(HeatDiscrete, EigenmodeDecay) {
  const int L = 64;
  for (int k : {1, 5, 31}) {
    Grid1D g{0, std::vector<double>(L + 1)};
    for (int x = 0; x <= L; ++x) g.values[x] = std::sin(std::numbers::pi * k * x / L);
    const double t = 7.5;
    const auto r = heat_solve_discrete(g, t);
    const double f = std::exp(-laplacian_eigenvalue(k, L) * t / 2.0);
    for (int x = 0; x <= L; ++x) EXPECT_NEAR(r.values[x], f * g.values[x], 1e-12);
  }
}

TEST(HeatDiscrete, MatchesEulerOracle) {
  CounterStream rng(4);
  Grid1D g{0, std::vector<double>(17)};
  for (auto& v : g.values) v = rng.uniform() * 4 - 2;
  const double t = 2.0;
  EXPECT_LT(sup_diff(heat_solve_discrete(g, t).values, oracle::euler_heat(g, t, 1e-4)), 1e-6);
}

TEST(HeatDiscrete, MaximumPrinciple) {
  CounterStream rng(5);
  Grid1D g{0, std::vector<double>(65)};
  for (auto& v : g.values) v = rng.uniform() * 10 - 3;
  const double lo = *std::min_element(g.values.begin(), g.values.end());
  const double hi = *std::max_element(g.values.begin(), g.values.end());
  for (double t : {0.1, 1.0, 10.0, 1000.0})
    for (double v : heat_solve_discrete(g, t).values) {
      EXPECT_GE(v, lo - 1e-12);
      EXPECT_LE(v, hi + 1e-12);
    }
}

TEST(HeatContinuous, LinearDataIsStationary) {
  HeatSeries s([](double x) { return 1.0 + 2.0 * x; }, 0.0, 1.0, 1.0, 3.0, 256);
  for (double x : {0.0, 0.3, 0.77, 1.0}) EXPECT_NEAR(s(x, 0.4), 1.0 + 2.0 * x, 1e-12);
}

TEST(HeatContinuous, SineModeDecay) {
  const int k = 3;
  HeatSeries s([](double x) { return std::sin(k * std::numbers::pi * x); }, 0.0, 1.0, 0.0, 0.0, 256);
  const double t = 0.01;
  for (double x : {0.1, 0.5, 0.9})
    EXPECT_NEAR(s(x, t), std::exp(-std::numbers::pi * std::numbers::pi * k * k * t / 2) * std::sin(k * std::numbers::pi * x),
                1e-8);
}

TEST(HeatContinuous, IncompatibleBoundaryThrows) {
  EXPECT_THROW(HeatSeries([](double) { return 1.0; }, 0.0, 1.0, 0.0, 0.0, 16), std::invalid_argument);
}

TEST(HeatContinuous, TruncationBoundShrinksWithTime) {
  HeatSeries s(tent, -1.0, 1.0, 0.0, 0.0, 512);
  EXPECT_TRUE(std::isinf(s.truncation_bound(0.0)));
  EXPECT_LT(s.truncation_bound(0.01), 1e-12);
}

TEST(HeatContinuous, DiscreteConvergesAtRateOneOverL) {
  // Rescaled lattice solution vs the continuum solution on [-1, 1]; error * L stays bounded.
  const double t = 0.1;
  HeatSeries cont(cosine, -1.0, 1.0, 0.0, 0.0, 1024);
  std::vector<double> scaled;
  for (int L : {128, 256, 512}) {
    Grid1D g{-L, std::vector<double>(2 * L + 1)};
    for (int x = -L; x <= L; ++x) g.at(x) = L * cosine(static_cast<double>(x) / L);
    const auto r = heat_solve_discrete(g, t * L * L);
    double err = 0;
    for (int x = -L; x <= L; ++x) err = std::max(err, std::abs(r.at(x) / L - cont(static_cast<double>(x) / L, t)));
    scaled.push_back(err * L);
  }
  EXPECT_LT(scaled.back(), 1.0);
  EXPECT_LE(scaled.back(), 1.5 * scaled.front());
}

TEST(Nonlinear, ZeroStaysZero) {
  Grid1D g{0, std::vector<double>(20, 0.0)};
  EXPECT_LT(sup_diff(nonlinear_solve(g, 5.0).values, g.values), 1e-15);
}

TEST(Nonlinear, MatchesEulerOracleAtSixteen) {
  CounterStream rng(6);
  Grid1D g{0, std::vector<double>(17, 0.0)};
  for (int x = 1; x < 16; ++x) g.values[x] = 8.0 * (rng.uniform() - 0.3);
  const double t = 3.0;
  EXPECT_LT(sup_diff(nonlinear_solve(g, t).values, oracle::euler_nonlinear(g, t, 1e-4)), 1e-6);
}

TEST(Nonlinear, PositiveGradientsStayPositive) {
  // Increasing data on a ramp keeps q >= 0.
  Grid1D g{0, std::vector<double>(33)};
  for (int x = 0; x <= 32; ++x) g.values[x] = 0.02 * x * x;
  const auto traj = nonlinear_trajectory(g, {1.0, 10.0, 100.0});
  for (const auto& s : traj)
    for (double q : s.gradient()) EXPECT_GE(q, -1e-9);
}

TEST(LaplacianBounds, ZeroData) {
  Grid1D g{0, std::vector<double>(9, 0.0)};
  const auto b = laplacian_bounds(g, 1.0);
  EXPECT_EQ(b.lower.values, g.values);
  EXPECT_EQ(b.upper.values, g.values);
}

TEST(LaplacianBounds, SandwichForConcaveData) {
  const int L = 64;
  for (auto phi : {+[](double x) { return cosine(x); }, +[](double x) { return tent(x); }}) {
    const auto g = profile_grid(phi, L, GridMapping::centered);
    const double t = 0.1 * L * L;
    const auto b = laplacian_bounds(g, t);
    ASSERT_TRUE(b.concave);
    const auto u = nonlinear_solve(g, t);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      EXPECT_GE(u.values[i], b.lower.values[i] - 1e-7);
      EXPECT_LE(u.values[i], b.upper.values[i] + 1e-7);
    }
  }
}

TEST(LaplacianBounds, LatticeMappingIsFlaggedNonConcave) {
  EXPECT_FALSE(laplacian_bounds(profile_grid(cosine, 32, GridMapping::lattice), 1.0).concave);
}

TEST(LaplacianBounds, SmallGradientsCloseTheGap) {
  const int L = 64;
  const auto g = profile_grid([](double x) { return 1e-4 * cosine(x); }, L, GridMapping::centered);
  const auto b = laplacian_bounds(g, 0.1 * L * L);
  EXPECT_LT(sup_diff(b.lower.values, b.upper.values), 1e-6);
}

TEST(Monitors, ZeroSolutionIsConstant) {
  Grid1D g{0, std::vector<double>(10, 0.0)};
  const auto r = gradient_monitors({g, g, g}, {0, 1, 2});
  for (double v : r.max_abs_q) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.q_violations + r.dsigma_violations, 0);
}

TEST(Monitors, NonIncreasingForSmoothConcaveData) {
  const int L = 64;
  const auto g = profile_grid(cosine, L, GridMapping::centered);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(0.005 * L * L * i);
  const auto r = gradient_monitors(nonlinear_trajectory(g, times), times, 1e-7);
  EXPECT_EQ(r.q_violations, 0);
  EXPECT_EQ(r.dsigma_violations, 0);
}

TEST(Monitors, DiscreteGradientBoundScalesInverselyWithL) {
  std::vector<double> consts;
  for (int L : {32, 64, 128}) {
    const auto g = profile_grid(cosine, L, GridMapping::centered);
    std::vector<double> times{0.0, 0.01 * L * L, 0.05 * L * L};
    consts.push_back(gradient_monitors(nonlinear_trajectory(g, times), times).empirical_constant);
  }
  EXPECT_LT(consts[2], 1.2 * consts[0]);
  EXPECT_GT(consts[2], 0.5 * consts[0]);
}
