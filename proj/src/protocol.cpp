#include "cvdv/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "cvdv/kernels.hpp"
#include "cvdv/metrics.hpp"

namespace cvdv {

using states::coherent_overlap;
using states::position_amplitude;

BlochAngles random_bloch(Rng& rng) {
  const double cos_theta = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {std::acos(std::clamp(cos_theta, -1.0, 1.0)), phi};
}

InputQubit InputQubit::from_bloch(const BlochAngles& angles, double beta) {
  return {std::cos(0.5 * angles.theta), std::polar(std::sin(0.5 * angles.theta), angles.phi), beta};
}

void InputQubit::validate() const {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12)
    throw std::invalid_argument("input qubit weights must satisfy |a|^2 + |b|^2 = 1");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and nonnegative");
}

const char* to_string(PeakClass c) { return c == PeakClass::Upsilon ? "upsilon" : "xi"; }

HybridKet plus_state(SpinId spin) {
  const double h = 1.0 / std::numbers::sqrt2;
  return HybridKet::spin(spin, h, h);
}

HybridKet build_channel(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  const HybridKet probe = tensor(plus_state(kBobSpin), HybridKet::coherent(kProbeMode, alpha));
  return relabel_mode(apply_cp(probe, kBobSpin, kProbeMode), kProbeMode, kChannelMode);
}

HybridKet prepare_input(const InputQubit& q) {
  q.validate();
  return normalize(HybridKet::coherent_pair(kInputMode, q.beta, q.a, q.b));
}

ProtocolStages evolve_stages(const HybridKet& channel, const HybridKet& input) {
  ProtocolStages st;
  st.channel = channel;

  HybridKet s = apply_beamsplitter(tensor(channel, input), kChannelMode, kInputMode);
  s = relabel_mode(s, kChannelMode, kSplitModeA);
  st.after_split = relabel_mode(s, kInputMode, kSplitModeB);

  s = tensor(tensor(st.after_split, plus_state(kAncillaSpinA)), plus_state(kAncillaSpinB));
  s = apply_cp(s, kAncillaSpinA, kSplitModeA);
  s = apply_cp(s, kAncillaSpinB, kSplitModeB);
  s = relabel_mode(s, kSplitModeA, kDetectModeA);
  st.after_cp = relabel_mode(s, kSplitModeB, kDetectModeB);

  st.final_state = apply_mw_pi2(apply_mw_pi2(st.after_cp, kAncillaSpinA), kAncillaSpinB);
  return st;
}

HybridKet evolve_to_final(const HybridKet& channel, const HybridKet& input) {
  return evolve_stages(channel, input).final_state;
}

namespace {

HybridKet spin_sector(const HybridKet& ket, Spin s2, Spin s3) {
  return project_spin(project_spin(ket, kAncillaSpinA, s2), kAncillaSpinB, s3);
}

constexpr Spin kSectorSpins[4][2] = {
    {Spin::Up, Spin::Up}, {Spin::Up, Spin::Down}, {Spin::Down, Spin::Up}, {Spin::Down, Spin::Down}};

}  // namespace

std::array<double, 4> spin_sector_probabilities(const HybridKet& ket) {
  const double total = inner_product(ket, ket).real();
  if (total < kZeroNormThreshold) throw ZeroNorm("cannot measure a null state");
  std::array<double, 4> p{};
  for (int k = 0; k < 4; ++k) {
    const HybridKet part = spin_sector(ket, kSectorSpins[k][0], kSectorSpins[k][1]);
    p[k] = inner_product(part, part).real() / total;
  }
  return p;
}

SpinReadout measure_spins(const HybridKet& ket, Rng& rng) {
  const auto p = spin_sector_probabilities(ket);
  const double u = rng.uniform();
  int pick = 3;
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += p[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }
  // Guard against rounding pushing u past the last nonzero sector.
  while (p[pick] <= 0.0 && pick > 0) --pick;
  const Spin s2 = kSectorSpins[pick][0], s3 = kSectorSpins[pick][1];
  return {s2, s3, normalize(spin_sector(ket, s2, s3)), p[pick]};
}

HomodyneDensity::HomodyneDensity(const HybridKet& ket, ModeId mode) {
  const std::size_t slot = ket.registry().require_mode(mode);
  const std::size_t n = ket.size();
  if (n == 0) throw ZeroNorm("homodyne density of the zero vector");

  // Group terms by their amplitude on the measured mode.
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> group_of;
  std::vector<std::size_t> group(n);
  std::vector<BasisLabel> rest(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = ket.terms()[k];
    const Complex g = t.label.modes[slot];
    auto [it, inserted] = group_of.try_emplace(
        {std::llround(g.real() / kDedupTolerance), std::llround(g.imag() / kDedupTolerance)}, amps_.size());
    if (inserted) amps_.push_back(g);
    group[k] = it->second;
    rest[k] = t.label;
    rest[k].modes.erase(rest[k].modes.begin() + static_cast<std::ptrdiff_t>(slot));
  }

  const std::size_t m = amps_.size();
  gram_.assign(m * m, Complex{});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const Complex ck = ket.terms()[k].coeff, cl = ket.terms()[l].coeff;
      if (ket.terms()[k].label.spins != ket.terms()[l].label.spins) continue;
      gram_[group[k] * m + group[l]] += ck * std::conj(cl) * label_overlap(rest[l], rest[k]);
    }

  Complex total = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) total += gram_[a * m + b] * coherent_overlap(amps_[b], amps_[a]);
  if (total.real() < kZeroNormThreshold) throw ZeroNorm("homodyne density of a null state");
  scale_ = 1.0 / total.real();

  for (const Complex& g : amps_) {
    real_ = real_ && g.imag() == 0.0;
    reach_ = std::max(reach_, std::abs(std::numbers::sqrt2 * g.real()));
  }
  if (!real_) return;

  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t a = 0; a < m; ++a) {
    const double qa = std::numbers::sqrt2 * amps_[a].real();
    centers_.push_back(qa);
    weights_.push_back(scale_ * gram_[a * m + a].real() * inv_sqrt_pi);
    for (std::size_t b = a + 1; b < m; ++b) {
      const double qb = std::numbers::sqrt2 * amps_[b].real();
      const double d = qa - qb;
      centers_.push_back(0.5 * (qa + qb));
      weights_.push_back(scale_ * 2.0 * gram_[a * m + b].real() * inv_sqrt_pi * std::exp(-0.25 * d * d));
    }
  }
}

void HomodyneDensity::evaluate(std::span<const double> xs, std::span<double> out) const {
  if (real_) {
    kernels::gaussian_sum(xs, centers_, weights_, out);
    return;
  }
  const std::size_t m = amps_.size();
  std::vector<Complex> psi(m);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t a = 0; a < m; ++a) psi[a] = position_amplitude(amps_[a], xs[i]);
    Complex acc = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) acc += gram_[a * m + b] * psi[a] * std::conj(psi[b]);
    out[i] = scale_ * acc.real();
  }
}

double HomodyneDensity::operator()(double x) const {
  double out = 0.0;
  evaluate({&x, 1}, {&out, 1});
  return out;
}

HomodyneDensity homodyne_density(const HybridKet& ket, ModeId mode) { return HomodyneDensity(ket, mode); }

HomodyneSample sample_homodyne(const HybridKet& ket, ModeId mode, Rng& rng) {
  const HomodyneDensity rho(ket, mode);
  const double range = rho.reach() + kHomodyneMargin;
  const std::size_t n = kHomodyneGridPoints;
  const double h = 2.0 * range / static_cast<double>(n - 1);

  std::vector<double> xs(n), pdf(n), cdf(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = -range + h * static_cast<double>(i);
  rho.evaluate(xs, pdf);
  for (double& v : pdf) v = std::max(v, 0.0);
  cdf[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) cdf[i] = cdf[i - 1] + 0.5 * h * (pdf[i - 1] + pdf[i]);

  const double target = rng.uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  const std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, n - 1);
  const std::size_t lo = hi - 1;
  const double span = cdf[hi] - cdf[lo];
  const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.5;
  const double x = xs[lo] + frac * h;
  return {x, normalize(project_mode_position(ket, mode, x))};
}

PeakClass classify_peak(double x, double alpha, double beta) {
  if (!(alpha > beta) || beta < 0.0)
    throw DegenerateGeometry("classification needs alpha > beta >= 0, got alpha=" + std::to_string(alpha) +
                             " beta=" + std::to_string(beta));
  return std::abs(x) <= alpha ? PeakClass::Xi : PeakClass::Upsilon;
}

CorrectionOp select_correction(Spin spin2, Spin spin3, PeakClass class8, PeakClass class9) {
  if (class8 == class9)
    throw InvalidCombination(std::string("both detected modes classified as ") + to_string(class8));
  const bool even = spin2 == spin3;
  if (class8 == PeakClass::Upsilon) return even ? CorrectionOp::Identity : CorrectionOp::PhaseFlip;
  return even ? CorrectionOp::BitFlip : CorrectionOp::BitPhaseFlip;
}

TeleportationRecord run_teleportation(double alpha, const InputQubit& q, Rng& rng) {
  TeleportationRecord rec;
  rec.seed = rng.seed();
  rec.input = q;

  const HybridKet final_state = evolve_to_final(build_channel(alpha), prepare_input(q));
  const SpinReadout spins = measure_spins(final_state, rng);
  const HomodyneSample h8 = sample_homodyne(spins.collapsed, kDetectModeA, rng);
  const HomodyneSample h9 = sample_homodyne(h8.collapsed, kDetectModeB, rng);

  rec.outcome.spin2 = spins.spin2;
  rec.outcome.spin3 = spins.spin3;
  rec.outcome.x8 = h8.x;
  rec.outcome.x9 = h9.x;
  rec.outcome.class8 = classify_peak(h8.x, alpha, q.beta);
  rec.outcome.class9 = classify_peak(h9.x, alpha, q.beta);

  const SpinVector raw = spin_vector(h9.collapsed);
  try {
    rec.correction = select_correction(spins.spin2, spins.spin3, rec.outcome.class8, rec.outcome.class9);
  } catch (const InvalidCombination&) {
    rec.heralded = true;
    rec.final_state = raw;
    rec.fidelity = fidelity(raw, q.target());
    throw FailedTrial(rec);
  }
  rec.final_state = apply_correction(raw, *rec.correction);
  rec.fidelity = fidelity(rec.final_state, q.target());
  return rec;
}

}  // namespace cvdv
