#include "cvdv/gates.hpp"

#include <cmath>
#include <numbers>

namespace cvdv {

namespace {

struct Branch {
  Complex factor;
  BasisLabel label;
};

// At most two branches per gate.
struct Branches {
  Branch items[2];
  int count = 0;

  void add(Complex f, BasisLabel l) { items[count++] = {f, std::move(l)}; }
};

template <class Map>
HybridKet map_ket(const HybridKet& ket, Map&& gate) {
  std::vector<CoherentTerm> terms;
  terms.reserve(2 * ket.size());
  for (const auto& t : ket.terms()) {
    Branches out = gate(t.label);
    for (int k = 0; k < out.count; ++k) terms.push_back({t.coeff * out.items[k].factor, std::move(out.items[k].label)});
  }
  return HybridKet(ket.registry(), std::move(terms));
}

template <class Map>
HybridMixture map_mixture(const HybridMixture& mix, Map&& gate) {
  std::vector<Dyad> dyads;
  dyads.reserve(4 * mix.size());
  for (const auto& d : mix.dyads()) {
    const Branches k = gate(d.ket);
    const Branches b = gate(d.bra);
    for (int i = 0; i < k.count; ++i)
      for (int j = 0; j < b.count; ++j)
        dyads.push_back({d.weight * k.items[i].factor * std::conj(b.items[j].factor), k.items[i].label, b.items[j].label});
  }
  return HybridMixture(mix.registry(), std::move(dyads));
}

auto cp_map(const Registry& reg, SpinId spin, ModeId mode) {
  const std::size_t s = reg.require_spin(spin);
  const std::size_t m = reg.require_mode(mode);
  return [s, m](const BasisLabel& in) {
    Branches out;
    BasisLabel l = in;
    if (l.spins[s] == Spin::Down) l.modes[m] = -l.modes[m];
    out.add(1.0, std::move(l));
    return out;
  };
}

auto bs_map(const Registry& reg, ModeId i, ModeId j) {
  if (i == j) throw SameMode("beam splitter needs two distinct modes, got " + to_string(i) + " twice");
  const std::size_t si = reg.require_mode(i);
  const std::size_t sj = reg.require_mode(j);
  return [si, sj](const BasisLabel& in) {
    constexpr double h = 1.0 / std::numbers::sqrt2;
    Branches out;
    BasisLabel l = in;
    const Complex ai = in.modes[si], aj = in.modes[sj];
    l.modes[si] = h * (ai + aj);
    l.modes[sj] = h * (ai - aj);
    out.add(1.0, std::move(l));
    return out;
  };
}

auto mw_map(const Registry& reg, SpinId spin) {
  const std::size_t s = reg.require_spin(spin);
  return [s](const BasisLabel& in) {
    constexpr double h = 1.0 / std::numbers::sqrt2;
    Branches out;
    BasisLabel up = in, down = in;
    up.spins[s] = Spin::Up;
    down.spins[s] = Spin::Down;
    const double sign = in.spins[s] == Spin::Up ? 1.0 : -1.0;
    out.add(h, std::move(up));
    out.add(sign * h, std::move(down));
    return out;
  };
}

// Image of the basis state `in` under the correction: (factor, new spin).
std::pair<double, Spin> correction_image(CorrectionOp op, Spin in) {
  switch (op) {
    case CorrectionOp::Identity:
      return {1.0, in};
    case CorrectionOp::PhaseFlip:
      return {in == Spin::Up ? 1.0 : -1.0, in};
    case CorrectionOp::BitFlip:
      return {1.0, flip(in)};
    case CorrectionOp::BitPhaseFlip:
      return {in == Spin::Up ? -1.0 : 1.0, flip(in)};
  }
  return {1.0, in};
}

auto correction_map(const Registry& reg, CorrectionOp op, SpinId spin) {
  const std::size_t s = reg.require_spin(spin);
  return [s, op](const BasisLabel& in) {
    Branches out;
    BasisLabel l = in;
    auto [f, to] = correction_image(op, in.spins[s]);
    l.spins[s] = to;
    out.add(f, std::move(l));
    return out;
  };
}

}  // namespace

std::string_view to_string(CorrectionOp op) {
  switch (op) {
    case CorrectionOp::Identity: return "identity";
    case CorrectionOp::PhaseFlip: return "phase_flip";
    case CorrectionOp::BitFlip: return "bit_flip";
    case CorrectionOp::BitPhaseFlip: return "bit_phase_flip";
  }
  return "?";
}

HybridKet apply_cp(const HybridKet& ket, SpinId spin, ModeId mode) {
  return map_ket(ket, cp_map(ket.registry(), spin, mode));
}
HybridMixture apply_cp(const HybridMixture& mix, SpinId spin, ModeId mode) {
  return map_mixture(mix, cp_map(mix.registry(), spin, mode));
}

HybridKet apply_beamsplitter(const HybridKet& ket, ModeId i, ModeId j) {
  return map_ket(ket, bs_map(ket.registry(), i, j));
}
HybridMixture apply_beamsplitter(const HybridMixture& mix, ModeId i, ModeId j) {
  return map_mixture(mix, bs_map(mix.registry(), i, j));
}

HybridKet apply_mw_pi2(const HybridKet& ket, SpinId spin) { return map_ket(ket, mw_map(ket.registry(), spin)); }
HybridMixture apply_mw_pi2(const HybridMixture& mix, SpinId spin) {
  return map_mixture(mix, mw_map(mix.registry(), spin));
}

HybridKet apply_correction(const HybridKet& ket, CorrectionOp op, SpinId spin) {
  return map_ket(ket, correction_map(ket.registry(), op, spin));
}
HybridMixture apply_correction(const HybridMixture& mix, CorrectionOp op, SpinId spin) {
  return map_mixture(mix, correction_map(mix.registry(), op, spin));
}

SpinVector apply_correction(const SpinVector& v, CorrectionOp op) {
  SpinVector out{};
  auto [fu, tu] = correction_image(op, Spin::Up);
  auto [fd, td] = correction_image(op, Spin::Down);
  (tu == Spin::Up ? out.up : out.down) += fu * v.up;
  (td == Spin::Up ? out.up : out.down) += fd * v.down;
  return out;
}

SpinDensity apply_correction(const SpinDensity& rho, CorrectionOp op) {
  // U rho U^dagger with U a signed permutation.
  SpinDensity out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto [fi, ti] = correction_image(op, static_cast<Spin>(i));
      auto [fj, tj] = correction_image(op, static_cast<Spin>(j));
      out.m[static_cast<int>(ti)][static_cast<int>(tj)] += fi * fj * rho.m[i][j];
    }
  return out;
}

}  // namespace cvdv
