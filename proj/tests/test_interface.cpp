#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numbers>

#include "droplet/lattice_path.hpp"
#include "droplet/pde.hpp"
#include "droplet/zero_range.hpp"
#include "oracles.hpp"

using namespace droplet;

namespace {
double tent(double x) { return std::min(x, 1.0 - x); }
double cosine(double x) { return std::cos(std::numbers::pi * x / 2.0); }

std::vector<double> as_double(const LatticePath& p) { return {p.h.begin(), p.h.end()}; }
}  // namespace

TEST(LatticePath, IdentityProfileIsAllUp) {
  const auto p = path_from_profile([](double x) { return x; }, 10);
  for (int x = 0; x <= 10; ++x) EXPECT_EQ(p.h[x], x);
  EXPECT_EQ(p.ups(), 10);
  EXPECT_EQ(p.downs(), 0);
}

TEST(LatticePath, FlatProfileIsZigZag) {
  const auto p = path_from_profile([](double) { return 0.0; }, 10);
  for (int x = 0; x <= 10; ++x) EXPECT_EQ(p.h[x], x % 2 == 0 ? 0 : -1);
}

TEST(LatticePath, TentProfileBalanced) {
  const auto p = path_from_profile(tent, 100);
  EXPECT_TRUE(p.valid());
  EXPECT_EQ(p.ups(), 50);
  EXPECT_EQ(p.downs(), 50);
}

TEST(LatticePath, NonLipschitzProfileRejected) {
  EXPECT_THROW(path_from_profile([](double x) { return 3.0 * x; }, 20), std::invalid_argument);
}

TEST(LatticePath, OccupancyViewRoundTrip) {
  EXPECT_EQ(ssep_view(path_from_profile([](double x) { return x; }, 8)), std::vector<std::uint8_t>(8, 1));
  const auto zz = ssep_view(path_from_profile([](double) { return 0.0; }, 8));
  for (int x = 0; x < 8; ++x) EXPECT_EQ(zz[x], x % 2 == 0 ? 0 : 1);
  CounterStream rng(3);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::uint8_t> eta(1 + rng.below(40));
    for (auto& e : eta) e = rng.coin();
    const auto p = path_from_occupancy(eta);
    ASSERT_TRUE(p.valid());
    ASSERT_EQ(ssep_view(p), eta);
    ASSERT_EQ(path_from_occupancy(ssep_view(p)), p);
  }
}

TEST(CornerFlip, InvariantsAfterEveryEvent) {
  const auto p0 = path_from_profile(tent, 64);
  CornerFlipEngine e(p0, 1);
  while (e.next_event(2000.0)) {
    ASSERT_TRUE(e.path().valid());
    ASSERT_EQ(e.path().h.back(), p0.h.back());
    ASSERT_EQ(e.path().ups(), p0.ups());
  }
}

TEST(CornerFlip, SingleCornerOccupation) {
  LatticePath p{{0, 1, 0}};
  CornerFlipEngine e(p, 2);
  double up = 0.0, last = 0.0;
  const double T = 20000.0;
  while (true) {
    const bool was_up = e.path().h[1] == 1;
    const bool more = e.next_event(T);
    if (was_up) up += e.clock() - last;
    last = e.clock();
    if (!more) break;
  }
  EXPECT_NEAR(up / T, 0.5, 0.02);
}

TEST(CornerFlip, UniformEquilibriumOnThreeThree) {
  // All 20 paths of Omega_{3,3}, sampled at well separated times.
  std::map<std::uint64_t, long> counts;
  const LatticePath start{{0, 1, 2, 3, 2, 1, 0}};
  CornerFlipEngine e(start, 5);
  const int samples = 40000;
  for (int s = 1; s <= samples; ++s) {
    e.step_to(10.0 * s);
    std::uint64_t key = 0;
    for (auto b : ssep_view(e.path())) key = 2 * key + b;
    ++counts[key];
  }
  ASSERT_EQ(counts.size(), 20u);
  double chi = 0;
  const double expect = samples / 20.0;
  for (auto [k, v] : counts) chi += (v - expect) * (v - expect) / expect;
  EXPECT_LT(chi, boost::math::quantile(boost::math::chi_squared(19), 0.99));
}

TEST(CornerFlip, SpectralMeansDecay) {
  const int L = 32;
  const auto p0 = path_from_profile(tent, L);
  const double t = 60.0;
  for (int k : {1, 2}) {
    const double f0 = spectral_coefficient(p0, k);
    const double expect = std::exp(-corner_flip_eigenvalue(k, L) * t / 2.0) * f0;
    const int n = 4000;
    double s = 0, s2 = 0;
    for (int seed = 0; seed < n; ++seed) {
      const double f = spectral_coefficient(corner_flip_run(p0, t, seed), k);
      s += f;
      s2 += f * f;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - expect), 3 * se + 1e-12) << "k=" << k;
  }
}

TEST(CornerFlip, ModeDeviationBound) {
  const int L = 64;
  const auto p0 = path_from_profile(tent, L);
  CornerFlipEngine e(p0, 9);
  const Grid1D g0{0, as_double(p0)};
  for (int s = 1; s <= 50; ++s) {
    const double t = 0.004 * L * L * s;
    e.step_to(t);
    const auto phi = heat_solve_discrete(g0, t).values;
    for (int k = 1; k < L; ++k) ASSERT_LE(std::abs(mode_deviation(e.path(), phi, k)), 4.0 * L * L / k);
  }
}

TEST(ZeroRange, InitialDataFormulas) {
  const auto flat = zr_initial([](double) { return 0.0; }, 10);
  for (auto v : flat.h) EXPECT_EQ(v, 0);
  const auto par = zr_initial([](double x) { return 1.0 - x * x; }, 10);
  for (int x = -10; x <= 11; ++x) {
    const double u = static_cast<double>(x) / 10;
    const std::int64_t expect = (x == -10 || x == 11) ? 0 : static_cast<std::int64_t>(std::floor(10 * (1 - u * u) + 1e-12));
    EXPECT_EQ(par.height(x), expect) << x;
  }
  std::int64_t sum = 0;
  for (auto e : par.gradients()) sum += e;
  EXPECT_EQ(sum, par.height(11) - par.height(-10));
}

TEST(ZeroRange, GeometricInitialData) {
  const auto z = zr_geometric_initial([](double) { return 0.0; }, 16, 1);
  for (auto v : z.h) EXPECT_EQ(v, 0);
  // Mean of the random heights equals L phi(x / L).
  const int L = 32, n = 4000;
  std::vector<double> mean(2 * L + 2, 0.0);
  for (int seed = 0; seed < n; ++seed) {
    const auto s = zr_geometric_initial(cosine, L, seed);
    for (std::size_t i = 0; i < s.h.size(); ++i) mean[i] += static_cast<double>(s.h[i]) / n;
  }
  for (int x = -L; x <= L; x += 8) EXPECT_NEAR(mean[x + L], L * cosine(static_cast<double>(x) / L), 0.08 * L) << x;
  // Close to the deterministic discretisation: by Kolmogorov's maximal inequality the centred walk
  // exceeds 5 standard deviations with probability at most 1/25.
  const int big = 512;
  const auto h0 = zr_initial(cosine, big);
  double var = 0.0;
  for (int x = -big; x <= big; ++x) {
    const double m = std::abs(big * (cosine(static_cast<double>(x + 1) / big) - cosine(static_cast<double>(x) / big)));
    var += m * (1.0 + m);
  }
  int ok = 0;
  for (int seed = 0; seed < 10; ++seed) {
    const auto s = zr_geometric_initial(cosine, big, seed);
    std::int64_t d = 0;
    for (int x = -big; x <= big; ++x) d = std::max<std::int64_t>(d, std::abs(s.height(x) - h0.height(x)));
    ok += d <= 5.0 * std::sqrt(var) + 1.0;
  }
  EXPECT_GE(ok, 9);
}

TEST(ZeroRange, FlatStateIsFrozen) {
  ZeroRangeState s{-5, std::vector<std::int64_t>(12, 0)};
  ZeroRangeEngine e(s, 1);
  EXPECT_FALSE(e.next_event(100.0));
  EXPECT_EQ(e.state(), s);
}

TEST(ZeroRange, SingleColumnAbsorptionMatchesExactChain) {
  for (std::int64_t height : {1, 2, 3}) {
    ZeroRangeState s{-2, {0, 0, height, 0, 0, 0}};
    const double exact = oracle::zr_exact_mean_absorption(s);
    const int n = 20000;
    double sum = 0, sq = 0;
    for (int seed = 0; seed < n; ++seed) {
      ZeroRangeEngine e(s, seed);
      while (e.next_event(1e12)) {
      }
      const double t = e.last_event() ? e.last_event()->time : 0.0;
      sum += t;
      sq += t * t;
    }
    const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - exact), 3 * se) << "height " << height << " exact " << exact;
  }
}

TEST(ZeroRange, InvariantsAfterEveryEvent) {
  const auto s0 = zr_geometric_initial(cosine, 32, 4);
  const auto v0 = particle_view(s0);
  ZeroRangeEngine e(s0, 6);
  int changes = v0.sign_changes;
  while (e.next_event(5000.0)) {
    const auto& s = e.state();
    ASSERT_EQ(s.h.front(), s0.h.front());
    ASSERT_EQ(s.h.back(), s0.h.back());
    const auto v = particle_view(s);
    ASSERT_EQ(v.a_count - v.b_count, v0.a_count - v0.b_count);
    ASSERT_LE(v.sign_changes, changes);
    changes = v.sign_changes;
  }
}

TEST(ZeroRange, AnnihilationRemovesOnePairAtATime) {
  const auto s0 = zr_initial(cosine, 32);
  ZeroRangeEngine e(s0, 2);
  auto prev = particle_view(e.state());
  while (e.next_event(3000.0)) {
    const auto v = particle_view(e.state());
    const auto da = prev.a_count - v.a_count, db = prev.b_count - v.b_count;
    ASSERT_TRUE((da == 0 && db == 0) || (da == 1 && db == 1)) << da << " " << db;
    prev = v;
  }
}

TEST(ZeroRange, CouplingIdenticalShiftedAndOrdered) {
  const auto s0 = zr_initial(cosine, 24);
  auto shifted = s0;
  for (auto& v : shifted.h) v += 3;
  std::vector<double> times;
  for (int i = 1; i <= 100; ++i) times.push_back(10.0 * i);
  const auto c = zr_couple({shifted, s0, s0}, times, 8);
  EXPECT_TRUE(c.ordered);
  EXPECT_EQ(c.violations, 0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(c.states[1][i], c.states[2][i]);
    for (std::size_t x = 0; x < s0.h.size(); ++x) ASSERT_EQ(c.states[0][i].h[x] - c.states[1][i].h[x], 3);
  }
}

TEST(ZeroRange, RandomOrderedPairsByHeightAndGradient) {
  CounterStream rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto hi = zr_geometric_initial(cosine, 12, trial);
    auto lo = hi;
    for (int x = lo.left + 1; x < lo.right(); ++x) lo.height(x) -= static_cast<std::int64_t>(rng.below(3));
    std::vector<double> times;
    for (int i = 1; i <= 100; ++i) times.push_back(2.0 * i);
    const auto c = zr_couple({hi, lo}, times, trial);
    ASSERT_TRUE(c.ordered);
    ASSERT_EQ(c.violations, 0);
    // Gradient order: add nonnegative increments to the gradient.
    auto steep = hi;
    std::int64_t acc = 0;
    for (int x = steep.left + 1; x <= steep.right(); ++x) {
      acc += static_cast<std::int64_t>(rng.below(2));
      steep.height(x) += acc;
    }
    const auto c2 = zr_couple({steep, hi}, times, trial + 1000);
    ASSERT_TRUE(c2.ordered);
    ASSERT_EQ(c2.violations, 0);
  }
}

TEST(ZeroRange, UnorderedInputStillRuns) {
  const auto a = zr_initial(cosine, 8);
  auto b = a;
  b.height(0) += 2;
  b.height(3) -= 2;
  const auto c = zr_couple({a, b}, {1.0, 2.0}, 1);
  EXPECT_FALSE(c.ordered);
  EXPECT_EQ(c.states[0].size(), 2u);
}

TEST(ZeroRange, GradientDominatedByGeometric) {
  // Tail of |eta_x(t)| vs a geometric of mean max |phi'| for geometric initial data.
  const int L = 16;
  const double m = std::numbers::pi / 2.0;  // max |d/dx cos(pi x / 2)|
  const int n = 10000;
  const int sites[3] = {-10, 0, 8};
  for (int site : sites) {
    std::map<std::int64_t, long> hist;
    for (int seed = 0; seed < n; ++seed) {
      const auto s = zr_run(zr_geometric_initial(cosine, L, seed), 0.05 * L * L, seed + 77);
      ++hist[std::abs(s.height(site + 1) - s.height(site))];
    }
    const double q = m / (1.0 + m);
    long tail = n;
    for (std::int64_t k = 0; k <= 12; ++k) {
      // P(|eta| >= k) <= q^k, with a 3-sigma binomial allowance.
      const double bound = std::pow(q, static_cast<double>(k));
      EXPECT_LE(static_cast<double>(tail) / n, bound + 3 * std::sqrt(bound * (1 - bound) / n) + 1e-12)
          << "site " << site << " k " << k;
      tail -= hist[k];
    }
  }
}

TEST(ZeroRangeVariant, RejectsMixedSpecies) {
  ZeroRangeState s{-3, {0, -1, 0, 1, 0, 0, 0, 0}};
  EXPECT_THROW(ZeroRangeEngine(s, 1, Annihilation::adjacent), std::invalid_argument);
}

TEST(ZeroRangeVariant, MonotoneProfileMatchesPlainDynamics) {
  // Only A particles: no annihilation can occur and both rules coincide pathwise.
  ZeroRangeState s{-8, {}};
  for (int x = -8; x <= 9; ++x) s.h.push_back(std::max(0, x + 8) / 2);
  s.h.back() = s.h[s.h.size() - 2];
  EXPECT_EQ(zr_variant_annihilate_adjacent(s, 50.0, 3), zr_run(s, 50.0, 3));
}

TEST(ZeroRangeVariant, ColumnRemovalEquivalenceUnderSharedClocks) {
  const int L = 64;
  ZeroRangeState s{-L, std::vector<std::int64_t>(2 * L + 2, 0)};
  for (int x = -L + 1; x <= L; ++x) s.height(x) = L - std::abs(x);
  s.height(L) = 0;
  for (int x = s.left + 1; x < s.right(); ++x) lower_strict_peaks(s, x);
  ASSERT_TRUE(species_ordered(s));
  ZeroRangeState red = remove_column(s, leftmost_max_column(s));
  CounterStream rng(5);
  const int n_sites = static_cast<int>(s.h.size());
  for (int step = 0; step < 200000; ++step) {
    const int c = s.left + 1 + static_cast<int>(rng.below(n_sites - 2));
    const Side side = rng.coin() ? Side::left : Side::right;
    const int p = leftmost_max_column(s);
    std::optional<std::pair<int, Side>> mapped;
    if (c < p)
      mapped = {{c, side}};
    else if (c > p + 1)
      mapped = {{c - 1, side}};
    else if (c == p && side == Side::left)
      mapped = {{p, Side::left}};
    else if (c == p + 1 && side == Side::right)
      mapped = {{p, Side::right}};
    zr_apply_clock(s, c, side, Annihilation::adjacent);
    if (mapped) zr_apply_clock(red, mapped->first, mapped->second);
    ASSERT_EQ(remove_column(s, leftmost_max_column(s)), red) << "step " << step;
    if (red.h == std::vector<std::int64_t>(red.h.size(), 0)) break;
  }
}

TEST(ZeroRangeVariant, SignChangesNonIncreasing) {
  ZeroRangeState s{-32, std::vector<std::int64_t>(66, 0)};
  for (int x = -31; x <= 32; ++x) s.height(x) = static_cast<std::int64_t>(std::floor(32 * cosine(x / 32.0)));
  s.height(32) = 0;
  ZeroRangeEngine e(s, 9, Annihilation::adjacent);
  int changes = particle_view(e.state()).sign_changes;
  while (e.next_event(4000.0)) {
    const int c = particle_view(e.state()).sign_changes;
    ASSERT_LE(c, changes);
    changes = c;
  }
}
