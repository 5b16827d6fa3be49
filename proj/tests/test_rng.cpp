#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "greedymax/rng.hpp"

using namespace greedymax;

TEST(CounterRng, SameKeySameStream) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, ReplayFromCounter) {
  CounterRng a(7);
  for (int i = 0; i < 10; ++i) a();
  CounterRng b(7, a.counter());
  EXPECT_EQ(a(), b());
}

TEST(CounterRng, UniformInUnitInterval) {
  CounterRng r(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(CounterRng, NormalMoments) {
  CounterRng r(3);
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(CounterRng, IndexInRange) {
  CounterRng r(5);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto k = r.index(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Substream, NamesAndSeedsSeparateStreams) {
  EXPECT_NE(substream(1, "proposal").key(), substream(1, "acceptance").key());
  EXPECT_NE(substream(1, "proposal").key(), substream(2, "proposal").key());
  EXPECT_EQ(substream(9, "batches"), substream(9, "batches"));
  EXPECT_NE(substream(9, "certify", 0).key(), substream(9, "certify", 1).key());
  EXPECT_EQ(substream(9, "certify", 4), substream(9, "certify", 4));
}
