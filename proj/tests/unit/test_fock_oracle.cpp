#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvdv/fock_oracle.hpp"
#include "cvdv/protocol.hpp"

using namespace cvdv;
using namespace cvdv::fock;

namespace {
const ModeId m4{4}, m5{5};
}

TEST(FockCoherent, VacuumIsUnitVector) {
  const auto v = coherent_vector(m4, 0.0, 10);
  EXPECT_EQ(v.amps[0], Complex(1.0));
  for (std::size_t n = 1; n < v.dim(); ++n) EXPECT_EQ(v.amps[n], Complex(0.0));
}

TEST(FockCoherent, NormWithinTail) {
  EXPECT_NEAR(norm(coherent_vector(m4, 2.0, 40)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(inner(coherent_vector(m4, 1.0, 40), coherent_vector(m4, -1.0, 40))), std::exp(-2.0), 1e-10);
}

TEST(FockCoherent, SmallCutoffThrows) {
  EXPECT_THROW(coherent_vector(m4, 3.0, 5), CutoffTooSmall);
  EXPECT_GT(coherent_tail(3.0, 5), 0.5);
  EXPECT_LT(coherent_tail(3.0, recommended_cutoff(3.0)), 1e-12);
}

TEST(FockBeamSplitter, CoherentInputMapsToCoherentOutput) {
  const Complex a = 1.2, b(-0.4, 0.7);
  const auto out = apply_bs_fock(tensor(coherent_vector(m4, a, 40), coherent_vector(m5, b, 40)), m4, m5);
  const auto expect = tensor(coherent_vector(m4, (a + b) / std::numbers::sqrt2, 40),
                             coherent_vector(m5, (a - b) / std::numbers::sqrt2, 40));
  EXPECT_GT(std::norm(inner(expect, out)), 1.0 - 1e-9);
}

TEST(FockBeamSplitter, VacuumUnchangedAndNormPreserved) {
  const auto vac = tensor(coherent_vector(m4, 0.0, 8), coherent_vector(m5, 0.0, 8));
  EXPECT_LT(distance(apply_bs_fock(vac, m4, m5), vac), 1e-15);

  // Random vector supported on low photon numbers so nothing leaks.
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0, 1);
  auto v = tensor(coherent_vector(m4, 0.0, 12), coherent_vector(m5, 0.0, 12));
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const std::size_t n4 = i / 13, n5 = i % 13;
    v.amps[i] = n4 + n5 <= 12 ? Complex(n(gen), n(gen)) : 0.0;
  }
  EXPECT_NEAR(norm(apply_bs_fock(v, m4, m5)), norm(v), 1e-10 * norm(v));
}

TEST(FockConditionalPhase, SinglePhotonAndCoherent) {
  const SpinId s1{1};
  auto one = tensor(spin_basis(s1, 0.0, 1.0), coherent_vector(m4, 0.0, 3));
  one.amps.assign(one.dim(), 0.0);
  one.amps[4 + 1] = 1.0;  // |down>|1>
  const auto flipped = apply_cp_fock(one, s1, m4);
  EXPECT_EQ(flipped.amps[5], Complex(-1.0));

  const auto down = apply_cp_fock(tensor(spin_basis(s1, 0.0, 1.0), coherent_vector(m4, 1.3, 40)), s1, m4);
  const auto target = tensor(spin_basis(s1, 0.0, 1.0), coherent_vector(m4, -1.3, 40));
  EXPECT_GT(std::norm(inner(target, down)), 1.0 - 1e-10);

  const auto up = tensor(spin_basis(s1, 1.0, 0.0), coherent_vector(m4, 1.3, 40));
  EXPECT_LT(distance(apply_cp_fock(up, s1, m4), up), 1e-15);
}

TEST(CrossValidate, ProtocolStates) {
  EXPECT_LT(cross_validate(build_channel(1.5), 60), 1e-9);
  const InputQubit q{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2, 0.5};
  const auto st = evolve_stages(build_channel(1.5), prepare_input(q));
  EXPECT_LT(cross_validate(st.final_state, 60), 1e-8);
  EXPECT_LT(cross_validate(HybridKet::coherent(m4, 0.0), 5), 1e-14);
}

TEST(CrossValidate, FockPipelineMatchesAnalyticStages) {
  const InputQubit q = InputQubit::from_bloch({0.7, 2.1}, 0.5);
  const auto fs = fock_stages(1.5, q, 40);
  const auto as = evolve_stages(build_channel(1.5), prepare_input(q));
  EXPECT_LT(distance(embed(as.channel, 40), fs.channel), 1e-10);
  EXPECT_LT(distance(embed(as.after_split, 40), fs.after_split), 1e-10);
  EXPECT_LT(distance(embed(as.final_state, 40), fs.final_state), 1e-10);
}

TEST(Hermite, FunctionsAreOrthonormal) {
  const double h = 0.01;
  std::vector<std::vector<double>> table;
  for (double x = -12; x <= 12; x += h) table.push_back(hermite_functions(6, x));
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) {
      double s = 0.0;
      for (const auto& row : table) s += row[a] * row[b] * h;
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-10);
    }
}

TEST(Hermite, PositionDensityMatchesAnalytic) {
  const auto ket = prepare_input(InputQubit::from_bloch({1.2, 0.4}, 1.0));
  const auto v = embed(ket, 40);
  const std::vector<double> xs{-2.0, -1.0, 0.0, 0.5, 1.5, 3.0};
  const auto numeric = position_density(v, ModeId{5}, xs);
  const HomodyneDensity h = homodyne_density(ket, ModeId{5});
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(numeric[i], h(xs[i]), 1e-10);
}
