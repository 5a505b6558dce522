#include <gtest/gtest.h>

#include <cmath>

#include "droplet/rng.hpp"

using namespace droplet;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}), (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, CopyForksIdenticalContinuation) {
  CounterStream a(42);
  for (int i = 0; i < 7; ++i) a.next_u32();
  CounterStream b = a;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterStream, StreamsDiffer) {
  CounterStream a(1, 0), b(1, 1), c(2, 0);
  EXPECT_NE(a.next_u64(), b.next_u64());
  CounterStream a2(1, 0);
  EXPECT_NE(a2.next_u64(), c.next_u64());
}

TEST(CounterStream, UniformMomentsAndRange) {
  CounterStream s(7);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n, 1.0 / 3.0, 0.005);
}

TEST(CounterStream, ExponentialAndGeometricMeans) {
  CounterStream s(9);
  const int n = 200000;
  double e = 0, g = 0, g0 = 0;
  for (int i = 0; i < n; ++i) {
    e += s.exponential(2.0);
    g += static_cast<double>(s.geometric(3.0));
    g0 += static_cast<double>(s.geometric(0.0));
  }
  EXPECT_NEAR(e / n, 0.5, 0.01);
  EXPECT_NEAR(g / n, 3.0, 0.05);
  EXPECT_EQ(g0, 0.0);
}

TEST(CounterStream, BelowIsUniform) {
  CounterStream s(11);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 100000; ++i) ++hist[s.below(5)];
  for (int h : hist) EXPECT_NEAR(h, 20000, 600);
}
