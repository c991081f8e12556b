#include "cvdv/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cvdv/gates.hpp"
#include "cvdv/metrics.hpp"

namespace cvdv {

NoiseParams NoiseParams::from_distance(double gamma_phi, double gamma, double l_att, double d0, double c) {
  NoiseParams p;
  p.gamma_phi = gamma_phi;
  p.gamma = gamma;
  p.l_att = l_att;
  p.d0 = d0;
  p.c = c;
  p.tau = d0 / c;
  p.validate();
  return p;
}

NoiseParams NoiseParams::from_decays(double gamma_phi_tau, double gamma_tau, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("loss amplitude r must lie in [0, 1]");
  NoiseParams p;
  p.gamma_phi = gamma_phi_tau;
  p.gamma = gamma_tau;
  p.tau = 1.0;
  p.l_att = 1.0;
  p.d0 = r == 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-r * r);
  p.validate();
  return p;
}

void NoiseParams::validate() const {
  for (double v : {gamma_phi, gamma, tau, d0, c})
    if (std::isnan(v) || v < 0.0) throw std::invalid_argument("noise parameters must be nonnegative");
  if (!(l_att > 0.0)) throw std::invalid_argument("attenuation length must be positive");
}

double NoiseParams::eta_p() const { return std::exp(-d0 / l_att); }
double NoiseParams::r_sq() const { return -std::expm1(-d0 / l_att); }
double NoiseParams::relaxation_factor() const { return std::exp(-gamma * tau); }
double NoiseParams::dephasing_factor() const { return std::exp(-0.5 * (4.0 * gamma_phi + gamma) * tau); }

HybridMixture noisy_channel(double alpha, const NoiseParams& p) {
  p.validate();
  const double ta = p.t() * alpha, ra = p.r() * alpha;
  const double e = p.relaxation_factor(), d = p.dephasing_factor();
  const BasisLabel up{{Spin::Up}, {ta, ra}};
  const BasisLabel down{{Spin::Down}, {-ta, -ra}};
  const BasisLabel jump{{Spin::Up}, {-ta, -ra}};
  std::vector<Dyad> dyads{
      {0.5, up, up}, {0.5 * d, up, down}, {0.5 * d, down, up}, {0.5 * e, down, down}, {0.5 * (1.0 - e), jump, jump},
  };
  return HybridMixture(Registry{{kBobSpin}, {kChannelMode, kLossMode}}, std::move(dyads));
}

NoisyStages noisy_stages(double alpha, const InputQubit& q, const NoiseParams& p) {
  NoisyStages st;
  st.channel = noisy_channel(alpha, p);
  const HybridMixture input = HybridMixture::from_ket(prepare_input(q));

  HybridMixture s = apply_beamsplitter(tensor(st.channel, input), kChannelMode, kInputMode);
  s = relabel_mode(s, kChannelMode, kSplitModeA);
  st.after_split = relabel_mode(s, kInputMode, kSplitModeB);

  s = tensor(st.after_split, HybridMixture::from_ket(tensor(plus_state(kAncillaSpinA), plus_state(kAncillaSpinB))));
  s = apply_cp(apply_cp(s, kAncillaSpinA, kSplitModeA), kAncillaSpinB, kSplitModeB);
  s = relabel_mode(relabel_mode(s, kSplitModeA, kDetectModeA), kSplitModeB, kDetectModeB);
  st.final_state = apply_mw_pi2(apply_mw_pi2(s, kAncillaSpinA), kAncillaSpinB);
  return st;
}

HybridMixture noisy_pipeline(double alpha, const InputQubit& q, const NoiseParams& p) {
  return noisy_stages(alpha, q, p).final_state;
}

namespace {

bool same_amp(Complex a, Complex b, double scale) { return std::abs(a - b) <= kDedupTolerance * std::max(1.0, scale); }

}  // namespace

SpinDensity condition_and_trace(const HybridMixture& mix, double alpha, double beta, const NoiseParams& p,
                                ConditionRoute route, TraceConvention convention) {
  const double ta = p.t() * alpha;
  if (beta == 0.0 || ta == 0.0)
    throw DegenerateGeometry("Upsilon and Xi cats coincide when beta or t*alpha vanishes");
  const double gp = (ta + beta) / std::numbers::sqrt2;
  const double gm = (ta - beta) / std::numbers::sqrt2;

  HybridMixture s = project_spin(project_spin(mix, kAncillaSpinA, Spin::Up), kAncillaSpinB, Spin::Up);
  if (route == ConditionRoute::Projective) {
    s = project_mode_coherent(s, kDetectModeA, gp);
    s = project_mode_coherent(s, kDetectModeB, gm);
  } else {
    const std::size_t m8 = s.registry().require_mode(kDetectModeA);
    const std::size_t m9 = s.registry().require_mode(kDetectModeB);
    const double scale = std::abs(gp) + std::abs(gm);
    auto on_pattern = [&](const BasisLabel& l) {
      return same_amp(l.modes[m8], gp, scale) && same_amp(l.modes[m9], gm, scale);
    };
    Registry reg = s.registry();
    reg.modes.erase(reg.modes.begin() + static_cast<std::ptrdiff_t>(std::max(m8, m9)));
    reg.modes.erase(reg.modes.begin() + static_cast<std::ptrdiff_t>(std::min(m8, m9)));
    std::vector<Dyad> kept;
    for (const auto& d : s.dyads()) {
      if (!on_pattern(d.ket) || !on_pattern(d.bra)) continue;
      Dyad out = d;
      for (BasisLabel* l : {&out.ket, &out.bra}) {
        l->modes.erase(l->modes.begin() + static_cast<std::ptrdiff_t>(std::max(m8, m9)));
        l->modes.erase(l->modes.begin() + static_cast<std::ptrdiff_t>(std::min(m8, m9)));
      }
      kept.push_back(std::move(out));
    }
    s = HybridMixture(std::move(reg), std::move(kept));
  }
  s = partial_trace_mode(s, kLossMode, convention);
  SpinDensity rho = spin_density(s);
  const Complex tr = rho.trace();
  if (std::abs(tr) < kZeroNormThreshold) throw ZeroNorm("conditioned state vanishes");
  for (auto& row : rho.m)
    for (auto& v : row) v /= tr.real();
  return rho;
}

namespace {

double loss_exponent(TraceConvention convention) { return convention == TraceConvention::AppendixA ? 1.0 : 2.0; }

}  // namespace

SpinDensity teleported_density(const SpinVector& target, double alpha, const NoiseParams& p,
                               TraceConvention convention) {
  p.validate();
  const double e = p.relaxation_factor();
  const double coh = p.dephasing_factor() * std::exp(-loss_exponent(convention) * p.r_sq() * alpha * alpha);
  const double pa = std::norm(target.up), pb = std::norm(target.down);
  SpinDensity rho;
  rho.m[0][0] = pa + pb * (1.0 - e);
  rho.m[1][1] = pb * e;
  rho.m[0][1] = target.up * std::conj(target.down) * coh;
  rho.m[1][0] = std::conj(rho.m[0][1]);
  return rho;
}

double average_fidelity_noisy(const NoiseParams& p, double alpha, TraceConvention convention) {
  p.validate();
  return 0.5 + p.relaxation_factor() / 6.0 +
         p.dephasing_factor() * std::exp(-loss_exponent(convention) * p.r_sq() * alpha * alpha) / 3.0;
}

double average_fidelity_noisy_quadrature(const NoiseParams& p, double alpha, TraceConvention convention,
                                         int order) {
  const GaussLegendre gl = gauss_legendre(order);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double theta = std::acos(gl.nodes[i]);
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double phi = std::numbers::pi * (gl.nodes[j] + 1.0);
      const SpinVector target = InputQubit::from_bloch({theta, phi}, 0.0).target();
      acc += gl.weights[i] * gl.weights[j] * std::numbers::pi *
             fidelity(teleported_density(target, alpha, p, convention), target);
    }
  }
  return acc / (4.0 * std::numbers::pi);
}

std::vector<DistanceRow> fidelity_vs_distance(double alpha, double gamma_phi, double gamma, double l_att, double c,
                                              const std::vector<double>& d0_grid, TraceConvention convention) {
  if (d0_grid.empty()) throw std::invalid_argument("distance grid is empty");
  std::vector<DistanceRow> rows;
  rows.reserve(d0_grid.size());
  for (double d0 : d0_grid) {
    const NoiseParams p = NoiseParams::from_distance(gamma_phi, gamma, l_att, d0, c);
    rows.push_back({d0 / 1e3, p.tau, p.r_sq(), average_fidelity_noisy(p, alpha, convention), classical_benchmark()});
  }
  return rows;
}

double max_distance_for_fidelity(double f_target, double alpha, double l_att, TraceConvention convention) {
  if (!(f_target > 2.0 / 3.0 && f_target < 1.0)) throw std::invalid_argument("target fidelity must lie in (2/3, 1)");
  if (!(alpha > 0.0) || !(l_att > 0.0)) throw std::invalid_argument("alpha and l_att must be positive");
  const double r_sq = -std::log(3.0 * f_target - 2.0) / (loss_exponent(convention) * alpha * alpha);
  if (r_sq > 1.0)
    throw Unattainable("inversion needs r^2 = " + std::to_string(r_sq) +
                       " > 1; the total-loss fidelity floor already exceeds the target, so no finite bound exists");
  if (r_sq == 1.0) return std::numeric_limits<double>::infinity();
  return -l_att * std::log1p(-r_sq);
}

}  // namespace cvdv
