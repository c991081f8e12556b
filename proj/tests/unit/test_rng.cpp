#include <set>

#include <gtest/gtest.h>

#include "cvdv/rng.hpp"
#include "oracles.hpp"

using cvdv::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, UniformStaysInRange) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform(-2.0, 3.0);
    ASSERT_GE(v, -2.0);
    ASSERT_LT(v, 3.0);
  }
}

TEST(Rng, UniformPassesChiSquare) {
  Rng r(2024);
  constexpr int bins = 50, n = 100000;
  std::vector<int> counts(bins, 0);
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(r.uniform() * bins)];
  double chi = 0.0;
  const double expect = double(n) / bins;
  for (int c : counts) chi += (c - expect) * (c - expect) / expect;
  EXPECT_GT(oracle::chi_square_pvalue(chi, bins - 1), 0.001);
}

TEST(Rng, DerivedStreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(cvdv::derive_stream_seed(42, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(cvdv::derive_stream_seed(42, 0), cvdv::derive_stream_seed(43, 0));
  EXPECT_EQ(cvdv::derive_stream_seed(7, 3), cvdv::derive_stream_seed(7, 3));
}

TEST(Rng, SplitmixKnownValue) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(cvdv::splitmix64(0), 0xe220a8397b1dcdafull);
}
