#include <chrono>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvdv/errors.hpp"
#include "cvdv/metrics.hpp"
#include "oracles.hpp"

using namespace cvdv;

TEST(Fidelity, PureStates) {
  const SpinVector t{0.6, Complex(0, 0.8)};
  EXPECT_NEAR(fidelity(t, t), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(SpinVector{Complex(0, 0.8), 0.6}, t), 0.0, 1e-15);
  EXPECT_THROW(fidelity(SpinVector{1.0, 1.0}, t), NotNormalized);
  EXPECT_NEAR(fidelity(SpinDensity::pure(t), t), 1.0, 1e-15);
}

TEST(Fidelity, RatioFormLimits) {
  // s = m1/m2 -> infinity reproduces the input; s = 0 with real a, b gives 4a^2 b^2.
  const double a = 0.6, b = 0.8;
  EXPECT_NEAR(oracle::ratio_fidelity(a, b, 1e12), 1.0, 1e-12);
  EXPECT_NEAR(oracle::ratio_fidelity(a, b, 0.0), 4 * a * a * b * b, 1e-15);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto gl = gauss_legendre(10);
  for (int p = 0; p < 20; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], p);
    EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(AverageFidelity, Limits) {
  EXPECT_NEAR(average_fidelity_vs_ratio(0.0), 1.0 / 3.0, 1e-8);
  EXPECT_GT(average_fidelity_vs_ratio(1e3), 1.0 - 1e-5);
  EXPECT_EQ(average_fidelity_vs_ratio(std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_THROW(average_fidelity_vs_ratio(1.0, 30), std::invalid_argument);
}

TEST(AverageFidelity, AgreesWithMonteCarloAtRatioOne) {
  const double mc = oracle::ratio_average_mc(1.0, 1000000, 17);
  EXPECT_NEAR(average_fidelity_vs_ratio(1.0), mc, 1e-3);
}

TEST(AverageFidelity, AgreesWithMidpointRule) {
  for (double s : {0.2, 0.5, 0.9, 1.1, 3.0, 4.0, 30.0})
    EXPECT_NEAR(average_fidelity_vs_ratio(s), oracle::ratio_average_midpoint(s, 800, 800), 2e-5) << s;
}

TEST(AverageFidelity, RefinementAwayFromUnitRatio) {
  for (double s : {0.0, 0.3, 0.7, 1.5, 2.0, 8.0})
    EXPECT_NEAR(average_fidelity_vs_ratio(s, 64), average_fidelity_vs_ratio(s, 128), 1e-10) << s;
}

TEST(AverageFidelity, FrozenValues) {
  // Equal weights leave the fixed state (|up> + |down>)/sqrt2.
  EXPECT_NEAR(average_fidelity_vs_ratio(1.0), 0.5, 1e-8);
  EXPECT_NEAR(average_fidelity_vs_ratio(2.0), oracle::ratio_average_midpoint(2.0, 1600, 1600), 1e-5);
}

TEST(LogAmplitudes, SwapSymmetry) {
  const auto a = log_homodyne_amplitudes(3.0, 1.0, 4.0, 2.0);
  const auto b = log_homodyne_amplitudes(3.0, 1.0, 2.0, 4.0);
  EXPECT_NEAR(a.log_m1, b.log_m2, 1e-12);
  EXPECT_NEAR(a.log_m2, b.log_m1, 1e-12);
  EXPECT_GT(a.log_m1, a.log_m2);  // near (4, 2) the first assignment wins
}

TEST(FidelityMap, ComplementaryStructure) {
  const GridAxis axis{-6.0, 6.0, 49};
  const auto map = fidelity_map(3.0, 1.0, axis, axis);
  const auto at = [&](double x8, double x9, const std::vector<double>& f) {
    const auto idx = [&](double x) { return std::size_t(std::lround((x - axis.lo) / (axis.hi - axis.lo) * 48)); };
    return f[map.index(idx(x8), idx(x9))];
  };
  EXPECT_GT(at(4.0, 2.0, map.f_bar), 0.99);
  EXPECT_LT(at(4.0, 2.0, map.f_bar_o), 0.5);
  EXPECT_GT(at(2.0, 4.0, map.f_bar_o), 0.99);
  EXPECT_GT(at(-4.0, 2.0, map.f_bar), 0.99);
  EXPECT_NEAR(at(2.0, 2.0, map.f_bar), 0.5, 1e-6);
  EXPECT_NEAR(at(2.0, 2.0, map.f_bar_o), 0.5, 1e-6);
  EXPECT_THROW(fidelity_map(1.0, 1.0, axis, axis), DegenerateGeometry);
  EXPECT_THROW(fidelity_map(1.0, 0.0, axis, axis), DegenerateGeometry);
}

TEST(FidelityMap, ThreadCountDoesNotChangeResult) {
  const GridAxis axis{-5.0, 5.0, 21};
  const auto one = fidelity_map(3.0, 1.0, axis, axis, 64, 1);
  const auto four = fidelity_map(3.0, 1.0, axis, axis, 64, 4);
  EXPECT_EQ(one.f_bar, four.f_bar);
  EXPECT_EQ(one.f_bar_o, four.f_bar_o);
}

TEST(FidelityMap, FullGridBudget) {
  const auto t0 = std::chrono::steady_clock::now();
  const GridAxis axis{-6.0, 6.0, 101};
  fidelity_map(3.0, 1.0, axis, axis);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
}

TEST(FailureProfile, EvenAndScaling) {
  const std::vector<double> xs{-3.0, -1.0, 0.5, 1.0, 3.0};
  const auto p = failure_profile(1.0, xs);
  EXPECT_NEAR(p[0].weight, p[4].weight, 1e-15);
  EXPECT_NEAR(p[1].weight, p[3].weight, 1e-15);
  // At x = 3 beta the far term dominates and carries e^{-beta^2}.
  for (double b : {1.0, 1.5, 2.0}) {
    const double w = failure_profile(b, {3 * b})[0].weight;
    EXPECT_NEAR(w / std::exp(-b * b), 1.0, 2e-3) << b;
  }
}

TEST(FailureProfile, IntegratedRatio) {
  auto integral = [](double b) {
    std::vector<double> xs;
    for (double x = -20; x <= 20; x += 0.01) xs.push_back(x);
    double s = 0.0;
    for (const auto& p : failure_profile(b, xs)) s += p.weight * 0.01;
    return s;
  };
  const double ratio = integral(1.5) / integral(1.0);
  EXPECT_NEAR(ratio, std::exp(-(1.5 * 1.5 - 1.0)), 0.01);
  // Normalized profile integrates to one.
  std::vector<double> xs;
  for (double x = -20; x <= 20; x += 0.01) xs.push_back(x);
  double s = 0.0;
  for (const auto& p : failure_profile_normalized(1.2, xs)) s += p.weight * 0.01;
  EXPECT_NEAR(s, 1.0, 1e-10);
}

TEST(Benchmark, TwoThirds) { EXPECT_NEAR(classical_benchmark(), 0.6667, 1e-4); }
