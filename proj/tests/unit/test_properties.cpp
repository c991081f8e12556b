// Randomized invariants: unitarity, normalization, positivity, symmetry.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvdv/metrics.hpp"
#include "cvdv/noise.hpp"
#include "cvdv/protocol.hpp"

using namespace cvdv;
using namespace cvdv::states;

namespace {

const SpinId s1{1}, s2{2};
const ModeId m4{4}, m5{5};

HybridKet random_ket(std::mt19937_64& gen, int terms) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<CoherentTerm> t;
  for (int k = 0; k < terms; ++k)
    t.push_back({Complex(n(gen), n(gen)),
                 {{k % 2 ? Spin::Down : Spin::Up, k % 3 ? Spin::Down : Spin::Up},
                  {Complex(n(gen), n(gen)), Complex(n(gen), n(gen))}}});
  return HybridKet(Registry{{s1, s2}, {m4, m5}}, t);
}

InputQubit random_input(std::mt19937_64& gen, double beta) {
  std::uniform_real_distribution<double> u(0, 1);
  return InputQubit::from_bloch({std::acos(2 * u(gen) - 1), 2 * std::numbers::pi * u(gen)}, beta);
}

}  // namespace

TEST(Property, GatesPreserveInnerProducts) {
  std::mt19937_64 gen(100);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_ket(gen, 1 + trial % 5), b = random_ket(gen, 2 + trial % 3);
    const Complex before = inner_product(a, b);
    const std::vector<std::function<HybridKet(const HybridKet&)>> gates = {
        [](const HybridKet& k) { return apply_cp(k, s1, m4); },
        [](const HybridKet& k) { return apply_cp(k, s2, m5); },
        [](const HybridKet& k) { return apply_beamsplitter(k, m4, m5); },
        [](const HybridKet& k) { return apply_beamsplitter(k, m5, m4); },
        [](const HybridKet& k) { return apply_mw_pi2(k, s1); },
        [](const HybridKet& k) { return apply_correction(k, CorrectionOp::BitPhaseFlip, s2); },
    };
    for (std::size_t g = 0; g < gates.size(); ++g) {
      const Complex after = inner_product(gates[g](a), gates[g](b));
      EXPECT_NEAR(std::abs(after - before), 0.0, 1e-10 * (1 + std::abs(before))) << "gate " << g;
    }
  }
}

TEST(Property, HomodyneDensitiesIntegrateToOne) {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = 0.2 + 1.5 * u(gen), alpha = beta + 0.1 + 3 * u(gen);
    const auto fin = evolve_to_final(build_channel(alpha), prepare_input(random_input(gen, beta)));
    for (ModeId m : {kDetectModeA, kDetectModeB}) {
      const HomodyneDensity h = homodyne_density(fin, m);
      const double lim = h.reach() + 9.0;
      const int n = 6000;
      double s = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double x = -lim + 2 * lim * i / n;
        s += (i == 0 || i == n ? 0.5 : 1.0) * h(x);
      }
      EXPECT_NEAR(s * 2 * lim / n, 1.0, 1e-8);
    }
  }
}

TEST(Property, TeleportedDensityTraceAndPositivity) {
  std::mt19937_64 gen(102);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = NoiseParams::from_decays(2 * u(gen), 2 * u(gen), u(gen));
    const auto q = random_input(gen, 1.0);
    for (auto conv : {TraceConvention::AppendixA, TraceConvention::Standard}) {
      const auto rho = teleported_density(q.target(), 3 * u(gen), p, conv);
      EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-14);
      EXPECT_GE(rho.determinant(), -1e-15);
      EXPECT_GE(rho.m[0][0].real(), 0.0);
      EXPECT_GE(rho.m[1][1].real(), 0.0);
      const double f = fidelity(rho, q.target());
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(Property, NoisyMixturesStayPositive) {
  std::mt19937_64 gen(103);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 15; ++trial) {
    const auto p = NoiseParams::from_decays(u(gen), u(gen), u(gen));
    const double alpha = 0.3 + 2 * u(gen);
    EXPECT_GE(min_eigenvalue(noisy_channel(alpha, p)), -1e-10);
    const auto st = noisy_stages(alpha, random_input(gen, 0.4), p);
    EXPECT_GE(min_eigenvalue(st.after_split), -1e-10);
    EXPECT_NEAR(std::abs(st.final_state.trace() - 1.0), 0.0, 1e-10);
  }
}

TEST(Property, AverageFidelityBoundedAndMonotone) {
  double prev = average_fidelity_vs_ratio(0.0);
  for (int i = 0; i < 100; ++i) {
    const double f = average_fidelity_vs_ratio(std::pow(10.0, -4.0 + 8.0 * i / 99.0));
    EXPECT_GE(f, 1.0 / 3.0 - 1e-12);
    EXPECT_LE(f, 1.0 + 1e-12);
    EXPECT_GE(f, prev - 1e-12) << i;
    prev = f;
  }
  EXPECT_THROW(average_fidelity_vs_ratio(-0.5), std::invalid_argument);
}

TEST(Property, FidelityMapSymmetries) {
  const GridAxis axis{-5.0, 5.0, 21};
  const auto map = fidelity_map(2.5, 0.8, axis, axis);
  const std::size_t n = axis.points;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      // swapping the detectors exchanges the two maps
      EXPECT_NEAR(map.f_bar[map.index(i, k)], map.f_bar_o[map.index(k, i)], 1e-12);
      // the cats are even, so the sign of x8 does not matter
      EXPECT_NEAR(map.f_bar[map.index(i, k)], map.f_bar[map.index(n - 1 - i, k)], 1e-12);
      EXPECT_GE(map.f_bar[map.index(i, k)], 1.0 / 3.0 - 1e-12);
    }
}

TEST(Property, ProtocolNormPreservedAcrossAmplitudes) {
  std::mt19937_64 gen(104);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double beta = 2 * u(gen), alpha = 4 * u(gen);
    const auto q = random_input(gen, beta);
    if (beta < 1e-3) continue;
    const auto st = evolve_stages(build_channel(alpha), prepare_input(q));
    for (const auto* k : {&st.channel, &st.after_split, &st.after_cp, &st.final_state})
      EXPECT_NEAR(norm(*k), 1.0, 1e-12);
    const auto p = spin_sector_probabilities(st.final_state);
    EXPECT_NEAR(p[0] + p[1] + p[2] + p[3], 1.0, 1e-12);
  }
}
