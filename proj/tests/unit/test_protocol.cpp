#include <cstdio>
#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvdv/fock_oracle.hpp"
#include "cvdv/metrics.hpp"
#include "cvdv/protocol.hpp"
#include "oracles.hpp"

using namespace cvdv;
using namespace cvdv::states;

namespace {
const double kH = 1.0 / std::numbers::sqrt2;
}

TEST(Channel, ProductStateAtZeroAmplitude) {
  const auto ch = build_channel(0.0);
  EXPECT_NEAR(norm(ch), 1.0, 1e-15);
  const auto rho = reduced_spin_density(ch, kBobSpin);
  EXPECT_NEAR(rho.m[0][1].real(), 0.5, 1e-15);  // pure (up + down)/sqrt2
}

TEST(Channel, TwoTermsUnitNorm) {
  const auto ch = build_channel(1.5);
  EXPECT_EQ(ch.size(), 2u);
  EXPECT_NEAR(norm(ch), 1.0, 1e-14);
  for (const auto& t : ch.terms())
    EXPECT_EQ(t.label.modes[0], Complex(t.label.spins[0] == Spin::Up ? 1.5 : -1.5));
}

TEST(InputQubit, Preparation) {
  EXPECT_EQ(prepare_input({1.0, 0.0, 0.7}).size(), 1u);
  EXPECT_NEAR(norm(prepare_input({kH, kH, 1.0})), 1.0, 1e-14);
  EXPECT_THROW(prepare_input({kH, -kH, 0.0}), ZeroNorm);
  EXPECT_THROW(InputQubit({1.0, 1.0, 0.5}).validate(), std::invalid_argument);
  EXPECT_THROW(InputQubit({1.0, 0.0, -0.5}).validate(), std::invalid_argument);
}

TEST(Pipeline, FinalStateMatchesHandExpansion) {
  const double alpha = 1.5, beta = 0.5;
  const InputQubit q{kH, kH, beta};
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input(q));
  const double n_in = norm(HybridKet::coherent_pair(kInputMode, beta, q.a, q.b));
  auto expect = oracle::final_state_by_hand(alpha, beta, q.a, q.b);
  ASSERT_EQ(fin.registry().spins, (std::vector<SpinId>{kBobSpin, kAncillaSpinA, kAncillaSpinB}));
  ASSERT_EQ(fin.registry().modes, (std::vector<ModeId>{kDetectModeA, kDetectModeB}));
  EXPECT_EQ(fin.size(), expect.size());
  for (const auto& t : fin.terms()) {
    const oracle::TermKey key{int(t.label.spins[0]), int(t.label.spins[1]), int(t.label.spins[2]),
                              t.label.modes[0].real(), t.label.modes[1].real()};
    auto it = std::find_if(expect.begin(), expect.end(), [&](const auto& e) {
      return std::get<0>(e.first) == std::get<0>(key) && std::get<1>(e.first) == std::get<1>(key) &&
             std::get<2>(e.first) == std::get<2>(key) && std::abs(std::get<3>(e.first) - std::get<3>(key)) < 1e-12 &&
             std::abs(std::get<4>(e.first) - std::get<4>(key)) < 1e-12;
    });
    ASSERT_NE(it, expect.end());
    EXPECT_NEAR(std::abs(t.coeff - it->second / n_in), 0.0, 1e-14);
    expect.erase(it);
  }
  EXPECT_TRUE(expect.empty());
}

TEST(Pipeline, UnitNormEvenAtZeroBeta) {
  const auto fin = evolve_to_final(build_channel(1.2), prepare_input({1.0, 0.0, 0.0}));
  EXPECT_NEAR(norm(fin), 1.0, 1e-14);
}

TEST(Pipeline, FockCrossValidation) {
  const auto fin = evolve_to_final(build_channel(1.5), prepare_input(InputQubit::from_bloch({2.0, 1.0}, 0.5)));
  EXPECT_LT(fock::cross_validate(fin, 60), 1e-8);
}

TEST(SpinReadout, SectorProbabilitiesFromFockOracle) {
  // Sector norms computed on the Fock basis. At this amplitude the cat
  // overlaps push the sectors well away from 1/4.
  const double alpha = 1.5, beta = 0.5;
  const InputQubit q{kH, kH, beta};
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input(q));
  const auto p = spin_sector_probabilities(fin);
  const auto fv = fock::fock_stages(alpha, q, 60).final_state;
  const std::size_t block = fv.dim() / 8;
  double sum = 0.0;
  for (int s2 = 0; s2 < 2; ++s2)
    for (int s3 = 0; s3 < 2; ++s3) {
      double w = 0.0;
      for (int s1 = 0; s1 < 2; ++s1) {
        const std::size_t base = std::size_t(s1 * 4 + s2 * 2 + s3) * block;
        for (std::size_t i = 0; i < block; ++i) w += std::norm(fv.amps[base + i]);
      }
      EXPECT_NEAR(p[std::size_t(2 * s2 + s3)], w, 1e-10);
      sum += p[std::size_t(2 * s2 + s3)];
    }
  EXPECT_NEAR(sum, 1.0, 1e-14);
  EXPECT_NEAR(p[1], p[2], 1e-12);  // ancillas enter symmetrically
}

TEST(SpinReadout, SectorsEvenAtLargeAmplitude) {
  const auto fin = evolve_to_final(build_channel(6.0), prepare_input(InputQubit{kH, kH, 2.0}));
  for (double p : spin_sector_probabilities(fin)) EXPECT_NEAR(p, 0.25, 1e-6);
}

TEST(SpinReadout, UpUpCollapseHasTwoBranchesPerSpin) {
  const double alpha = 4.5, beta = 1.5;
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input({kH, kH, beta}));
  const auto upup = project_spin(project_spin(fin, kAncillaSpinA, Spin::Up), kAncillaSpinB, Spin::Up);
  // Two input signs times two spin-1 values, each carrying its cat pair.
  EXPECT_EQ(upup.registry().spins, (std::vector<SpinId>{kBobSpin}));
  for (const auto& t : upup.terms()) {
    const double m8 = std::abs(t.label.modes[0].real()), m9 = std::abs(t.label.modes[1].real());
    const double far = (alpha + beta) * kH, near = (alpha - beta) * kH;
    EXPECT_TRUE((std::abs(m8 - far) < 1e-12 && std::abs(m9 - near) < 1e-12) ||
                (std::abs(m8 - near) < 1e-12 && std::abs(m9 - far) < 1e-12));
  }
}

TEST(SpinReadout, DeterministicGivenSeed) {
  const auto fin = evolve_to_final(build_channel(1.5), prepare_input({kH, kH, 0.5}));
  Rng a(9), b(9);
  const auto ra = measure_spins(fin, a), rb = measure_spins(fin, b);
  EXPECT_EQ(ra.spin2, rb.spin2);
  EXPECT_EQ(ra.spin3, rb.spin3);
  EXPECT_EQ(ra.probability, rb.probability);
  EXPECT_NEAR(norm(ra.collapsed), 1.0, 1e-14);
}

TEST(Homodyne, CatPeaksSitAtScaledAmplitude) {
  // (alpha + beta)/sqrt2 amplitude puts peaks at +-(alpha + beta).
  const double alpha = 3.0, beta = 1.0;
  const auto cat = HybridKet::coherent_pair(kDetectModeA, (alpha + beta) * kH, 1.0, 1.0);
  const HomodyneDensity h = homodyne_density(cat, kDetectModeA);
  ASSERT_TRUE(h.is_gaussian_sum());
  EXPECT_GT(h(4.0), h(3.9));
  EXPECT_GT(h(4.0), h(4.1));
  EXPECT_NEAR(h(4.0), h(-4.0), 1e-15);
  EXPECT_NEAR(h.reach(), 4.0, 1e-12);
}

TEST(Homodyne, VacuumIsSingleGaussian) {
  const HomodyneDensity h = homodyne_density(HybridKet::coherent(kDetectModeA, 0.0), kDetectModeA);
  EXPECT_NEAR(h(0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(h(1.0), std::exp(-1.0) / std::sqrt(std::numbers::pi), 1e-15);
}

TEST(Homodyne, ComplexAmplitudesUseGeneralPath) {
  const auto k = HybridKet::coherent_pair(kDetectModeA, Complex(1.0, 0.5), 1.0, Complex(0.0, 1.0));
  const HomodyneDensity h = homodyne_density(k, kDetectModeA);
  EXPECT_FALSE(h.is_gaussian_sum());
  const auto numeric = fock::position_density(fock::embed(k, 40), kDetectModeA, {-1.0, 0.0, 0.7, 2.0});
  const std::vector<double> xs{-1.0, 0.0, 0.7, 2.0};
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(h(xs[i]), numeric[i], 1e-10);
}

TEST(Homodyne, DensityMatchesFockPointwise) {
  const double alpha = 1.5, beta = 0.5;
  const InputQubit q = InputQubit::from_bloch({1.0, 0.3}, beta);
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input(q));
  const auto fv = fock::fock_stages(alpha, q, 60).final_state;
  std::vector<double> xs;
  for (double x = -5; x <= 5; x += 0.25) xs.push_back(x);
  for (ModeId m : {kDetectModeA, kDetectModeB}) {
    const HomodyneDensity h = homodyne_density(fin, m);
    const auto numeric = fock::position_density(fv, m, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(h(xs[i]), numeric[i], 1e-6);
  }
}

TEST(Homodyne, SamplesFollowDensityChiSquare) {
  const double alpha = 3.0, beta = 1.0;
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input({kH, kH, beta}));
  const auto upup = normalize(project_spin(project_spin(fin, kAncillaSpinA, Spin::Up), kAncillaSpinB, Spin::Up));
  const HomodyneDensity h = homodyne_density(upup, kDetectModeA);

  constexpr int n = 100000;
  const double lo = -8.0, hi = 8.0;
  constexpr int bins = 64;
  std::vector<int> counts(bins, 0);
  Rng rng(77);
  int outside = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_homodyne(upup, kDetectModeA, rng).x;
    if (x < lo || x >= hi) {
      ++outside;
      continue;
    }
    ++counts[int((x - lo) / (hi - lo) * bins)];
  }
  double chi = 0.0;
  int dof = 0;
  for (int b = 0; b < bins; ++b) {
    // bin probability by Simpson's rule on the analytic density
    const double a = lo + b * (hi - lo) / bins, c = a + (hi - lo) / bins;
    double pb = 0.0;
    const int sub = 40;
    for (int k = 0; k < sub; ++k) {
      const double x0 = a + (c - a) * k / sub, x1 = a + (c - a) * (k + 1) / sub;
      pb += (x1 - x0) / 6 * (h(x0) + 4 * h(0.5 * (x0 + x1)) + h(x1));
    }
    const double e = pb * n;
    if (e < 5) continue;
    chi += (counts[b] - e) * (counts[b] - e) / e;
    ++dof;
  }
  EXPECT_LT(outside, 5);
  EXPECT_GT(oracle::chi_square_pvalue(chi, dof - 1), 0.01) << "chi2=" << chi << " dof=" << dof;
}

TEST(Homodyne, SamplesClusterNearCatCenters) {
  const double alpha = 4.5, beta = 1.5;
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input({kH, kH, beta}));
  const auto upup = normalize(project_spin(project_spin(fin, kAncillaSpinA, Spin::Up), kAncillaSpinB, Spin::Up));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double x = std::abs(sample_homodyne(upup, kDetectModeA, rng).x);
    EXPECT_LT(std::min(std::abs(x - (alpha + beta)), std::abs(x - (alpha - beta))), 3.0);
  }
  Rng r1(8), r2(8);
  EXPECT_EQ(sample_homodyne(upup, kDetectModeA, r1).x, sample_homodyne(upup, kDetectModeA, r2).x);
}

TEST(Classify, PeakClassesAndBoundary) {
  const double alpha = 3.0, beta = 1.0;
  EXPECT_EQ(classify_peak(alpha + beta, alpha, beta), PeakClass::Upsilon);
  EXPECT_EQ(classify_peak(-(alpha + beta), alpha, beta), PeakClass::Upsilon);
  EXPECT_EQ(classify_peak(alpha - beta, alpha, beta), PeakClass::Xi);
  EXPECT_EQ(classify_peak(alpha, alpha, beta), PeakClass::Xi);
  EXPECT_THROW(classify_peak(0.0, 1.0, 1.0), DegenerateGeometry);
}

TEST(Classify, CorrectionTable) {
  using enum PeakClass;
  EXPECT_EQ(select_correction(Spin::Up, Spin::Up, Upsilon, Xi), CorrectionOp::Identity);
  EXPECT_EQ(select_correction(Spin::Down, Spin::Down, Upsilon, Xi), CorrectionOp::Identity);
  EXPECT_EQ(select_correction(Spin::Down, Spin::Up, Upsilon, Xi), CorrectionOp::PhaseFlip);
  EXPECT_EQ(select_correction(Spin::Up, Spin::Up, Xi, Upsilon), CorrectionOp::BitFlip);
  EXPECT_EQ(select_correction(Spin::Up, Spin::Down, Xi, Upsilon), CorrectionOp::BitPhaseFlip);
  EXPECT_THROW(select_correction(Spin::Up, Spin::Up, Xi, Xi), InvalidCombination);
  EXPECT_THROW(select_correction(Spin::Up, Spin::Up, Upsilon, Upsilon), InvalidCombination);
}

TEST(Correction, EveryPatternRestoresTargetForSeparatedCats) {
  // Condition on each spin pattern and on the exact peak centers; the
  // corrected spin must equal the input.
  const double alpha = 9.0, beta = 3.0;
  const InputQubit q = InputQubit::from_bloch({1.1, 0.7}, beta);
  const auto fin = evolve_to_final(build_channel(alpha), prepare_input(q));
  for (Spin s2 : {Spin::Up, Spin::Down})
    for (Spin s3 : {Spin::Up, Spin::Down})
      for (double sign8 : {1.0, -1.0})
        for (double sign9 : {1.0, -1.0})
          for (bool swap : {false, true}) {
            const double x8 = sign8 * (swap ? alpha - beta : alpha + beta);
            const double x9 = sign9 * (swap ? alpha + beta : alpha - beta);
            const auto c = project_mode_position(
                project_mode_position(project_spin(project_spin(fin, kAncillaSpinA, s2), kAncillaSpinB, s3),
                                      kDetectModeA, x8),
                kDetectModeB, x9);
            const auto op = select_correction(s2, s3, classify_peak(x8, alpha, beta), classify_peak(x9, alpha, beta));
            const SpinVector out = apply_correction(spin_vector(normalize(c)), op);
            EXPECT_GT(fidelity(out, q.target()), 1.0 - 1e-9);
          }
}

TEST(Teleportation, FixedSeedReproducesRecord) {
  const InputQubit q = InputQubit::from_bloch({0.8, 1.9}, 1.5);
  Rng a(31), b(31);
  const auto ra = run_teleportation(4.5, q, a);
  const auto rb = run_teleportation(4.5, q, b);
  EXPECT_EQ(ra.outcome.x8, rb.outcome.x8);
  EXPECT_EQ(ra.outcome.x9, rb.outcome.x9);
  EXPECT_EQ(ra.fidelity, rb.fidelity);
  EXPECT_EQ(ra.seed, 31u);
}

TEST(Teleportation, LargeAmplitudeMeanFidelity) {
  double sum = 0.0;
  int ok = 0, failed = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_stream_seed(42, i));
    const InputQubit q = InputQubit::from_bloch(random_bloch(rng), 1.5);
    try {
      sum += run_teleportation(4.5, q, rng).fidelity;
      ++ok;
    } catch (const FailedTrial& f) {
      EXPECT_TRUE(f.record().heralded);
      EXPECT_FALSE(f.record().correction.has_value());
      ++failed;
    }
  }
  EXPECT_GT(sum / ok, 0.99);
  EXPECT_LT(failed, 30);
}

TEST(Teleportation, SmallAmplitudeDegrades) {
  double sum = 0.0;
  int ok = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_stream_seed(1, i));
    try {
      sum += run_teleportation(0.6, InputQubit::from_bloch(random_bloch(rng), 0.2), rng).fidelity;
      ++ok;
    } catch (const FailedTrial&) {
    }
  }
  EXPECT_LT(sum / ok, 0.95);
}

TEST(Bloch, RandomPointsAreUniformInCosTheta) {
  Rng rng(3);
  constexpr int bins = 20, n = 40000;
  std::vector<int> counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    const auto b = random_bloch(rng);
    ASSERT_GE(b.phi, 0.0);
    ASSERT_LT(b.phi, 2 * std::numbers::pi);
    ++counts[std::min(bins - 1, int((std::cos(b.theta) + 1) / 2 * bins))];
  }
  double chi = 0.0;
  for (int c : counts) chi += (c - double(n) / bins) * (c - double(n) / bins) / (double(n) / bins);
  EXPECT_GT(oracle::chi_square_pvalue(chi, bins - 1), 0.001);
}
