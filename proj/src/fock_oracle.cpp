#include "cvdv/fock_oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include "cvdv/errors.hpp"

namespace cvdv::fock {

namespace {

struct Layout {
  std::size_t spins = 0;
  std::size_t modes = 0;
  std::size_t d = 1;
  std::size_t mode_block = 1;  // d^modes

  explicit Layout(const FockVector& v) : Layout(v.registry, v.cutoff) {}
  Layout(const Registry& reg, int cutoff)
      : spins(reg.spins.size()), modes(reg.modes.size()), d(static_cast<std::size_t>(cutoff) + 1) {
    for (std::size_t m = 0; m < modes; ++m) mode_block *= d;
  }

  std::size_t dim() const { return (std::size_t{1} << spins) * mode_block; }
  std::size_t mode_stride(std::size_t slot) const {
    std::size_t s = 1;
    for (std::size_t m = slot + 1; m < modes; ++m) s *= d;
    return s;
  }
  std::size_t spin_stride(std::size_t slot) const { return (std::size_t{1} << (spins - 1 - slot)) * mode_block; }

  void decode(std::size_t idx, std::vector<int>& sp, std::vector<int>& ns) const {
    sp.resize(spins);
    ns.resize(modes);
    std::size_t rest = idx % mode_block;
    std::size_t bits = idx / mode_block;
    for (std::size_t s = spins; s-- > 0;) {
      sp[s] = static_cast<int>(bits & 1u);
      bits >>= 1;
    }
    for (std::size_t m = modes; m-- > 0;) {
      ns[m] = static_cast<int>(rest % d);
      rest /= d;
    }
  }

  std::size_t encode(const std::vector<int>& sp, const std::vector<int>& ns) const {
    std::size_t bits = 0;
    for (std::size_t s = 0; s < spins; ++s) bits = (bits << 1) | static_cast<std::size_t>(sp[s]);
    std::size_t rest = 0;
    for (std::size_t m = 0; m < modes; ++m) rest = rest * d + static_cast<std::size_t>(ns[m]);
    return bits * mode_block + rest;
  }
};

std::vector<Complex> coherent_coeffs(Complex alpha, int cutoff) {
  const double tail = coherent_tail(alpha, cutoff);
  if (tail > kTailTolerance)
    throw CutoffTooSmall("cutoff " + std::to_string(cutoff) + " leaves tail " + std::to_string(tail) +
                         " for |alpha| = " + std::to_string(std::abs(alpha)));
  std::vector<Complex> c(static_cast<std::size_t>(cutoff) + 1);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n - 1)] * alpha / std::sqrt(double(n));
  return c;
}

// Blocks indexed by total photon number n = 0..2N, acting on |k, n-k>
// with k the photon number of the first mode.
using BlockSet = std::vector<Eigen::MatrixXd>;

std::shared_ptr<const BlockSet> bs_blocks(int cutoff) {
  static std::shared_mutex mutex;
  static std::map<int, std::shared_ptr<const BlockSet>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(cutoff); it != cache.end()) return it->second;
  }
  auto blocks = std::make_shared<BlockSet>();
  for (int n = 0; n <= 2 * cutoff; ++n) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int k = 0; k < n; ++k) {
      const double v = std::sqrt(double(k + 1) * double(n - k));
      g(k + 1, k) = v;
      g(k, k + 1) = -v;
    }
    Eigen::MatrixXd u = (0.25 * std::numbers::pi * g).exp();
    for (int k = 0; k <= n; ++k)
      if ((n - k) % 2 == 1) u.row(k) *= -1.0;
    blocks->push_back(std::move(u));
  }
  std::unique_lock lock(mutex);
  return cache.try_emplace(cutoff, std::move(blocks)).first->second;
}

void require_same_layout(const FockVector& a, const FockVector& b) {
  if (a.registry != b.registry || a.cutoff != b.cutoff)
    throw RegistryMismatch(a.registry.describe() + " vs " + b.registry.describe());
}

}  // namespace

int recommended_cutoff(double max_abs_amplitude) {
  const double a = std::abs(max_abs_amplitude);
  return static_cast<int>(std::ceil(a * a + 10.0 * a + 20.0));
}

double coherent_tail(Complex alpha, int cutoff) {
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term < 1e-30 * std::max(tail, 1e-300)) break;
    if (n > cutoff + 100000) break;
  }
  return tail;
}

FockVector coherent_vector(ModeId mode, Complex alpha, int cutoff) {
  return {Registry{{}, {mode}}, cutoff, coherent_coeffs(alpha, cutoff)};
}

FockVector spin_basis(SpinId spin, Complex up, Complex down) { return {Registry{{spin}, {}}, 0, {up, down}}; }

Complex overlap_fock(Complex alpha, Complex beta, int cutoff) {
  const ModeId m{0};
  return inner(coherent_vector(m, alpha, cutoff), coherent_vector(m, beta, cutoff));
}

FockVector embed(const HybridKet& ket, int cutoff) {
  FockVector v{ket.registry(), cutoff, {}};
  const Layout lay(v);
  v.amps.assign(lay.dim(), Complex{});
  std::vector<int> sp, ns;
  for (const auto& t : ket.terms()) {
    std::vector<std::vector<Complex>> coeffs;
    for (const Complex& a : t.label.modes) coeffs.push_back(coherent_coeffs(a, cutoff));
    sp.assign(lay.spins, 0);
    for (std::size_t s = 0; s < lay.spins; ++s) sp[s] = static_cast<int>(t.label.spins[s]);
    ns.assign(lay.modes, 0);
    const std::size_t base = lay.encode(sp, ns);
    for (std::size_t r = 0; r < lay.mode_block; ++r) {
      std::size_t rest = r;
      Complex c = t.coeff;
      for (std::size_t m = lay.modes; m-- > 0;) {
        c *= coeffs[m][rest % lay.d];
        rest /= lay.d;
      }
      v.amps[base + r] += c;
    }
  }
  return v;
}

Complex inner(const FockVector& bra, const FockVector& ket) {
  require_same_layout(bra, ket);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < ket.amps.size(); ++i) acc += std::conj(bra.amps[i]) * ket.amps[i];
  return acc;
}

double norm(const FockVector& v) {
  double acc = 0.0;
  for (const Complex& a : v.amps) acc += std::norm(a);
  return std::sqrt(acc);
}

double distance(const FockVector& a, const FockVector& b) {
  require_same_layout(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::norm(a.amps[i] - b.amps[i]);
  return std::sqrt(acc);
}

FockVector tensor(const FockVector& left, const FockVector& right) {
  const bool left_has_modes = !left.registry.modes.empty();
  const bool right_has_modes = !right.registry.modes.empty();
  if (left_has_modes && right_has_modes && left.cutoff != right.cutoff)
    throw RegistryMismatch("tensor of Fock vectors with different cutoffs");
  const int cutoff = left_has_modes ? left.cutoff : right.cutoff;

  Registry merged = left.registry;
  for (SpinId s : right.registry.spins) {
    if (left.registry.spin_slot(s)) throw RegistryCollision("spin " + to_string(s) + " on both sides");
    merged.spins.push_back(s);
  }
  for (ModeId m : right.registry.modes) {
    if (left.registry.mode_slot(m)) throw RegistryCollision("mode " + to_string(m) + " on both sides");
    merged.modes.push_back(m);
  }
  std::sort(merged.spins.begin(), merged.spins.end());
  std::sort(merged.modes.begin(), merged.modes.end());

  FockVector out{merged, cutoff, {}};
  const Layout lo(merged, cutoff), ll(left.registry, cutoff), lr(right.registry, cutoff);
  out.amps.resize(lo.dim());
  std::vector<int> sp, ns, lsp(ll.spins), lns(ll.modes), rsp(lr.spins), rns(lr.modes);
  for (std::size_t idx = 0; idx < out.amps.size(); ++idx) {
    lo.decode(idx, sp, ns);
    for (std::size_t s = 0; s < ll.spins; ++s) lsp[s] = sp[*merged.spin_slot(left.registry.spins[s])];
    for (std::size_t s = 0; s < lr.spins; ++s) rsp[s] = sp[*merged.spin_slot(right.registry.spins[s])];
    for (std::size_t m = 0; m < ll.modes; ++m) lns[m] = ns[*merged.mode_slot(left.registry.modes[m])];
    for (std::size_t m = 0; m < lr.modes; ++m) rns[m] = ns[*merged.mode_slot(right.registry.modes[m])];
    out.amps[idx] = left.amps[ll.encode(lsp, lns)] * right.amps[lr.encode(rsp, rns)];
  }
  return out;
}

FockVector relabel_mode(const FockVector& v, ModeId from, ModeId to) {
  const std::size_t src = v.registry.require_mode(from);
  if (from != to && v.registry.mode_slot(to)) throw RegistryCollision("mode " + to_string(to) + " already present");
  Registry reg = v.registry;
  reg.modes[src] = to;
  std::sort(reg.modes.begin(), reg.modes.end());
  // new slot of each old slot
  std::vector<std::size_t> target(v.registry.modes.size());
  for (std::size_t m = 0; m < target.size(); ++m) target[m] = *reg.mode_slot(m == src ? to : v.registry.modes[m]);

  FockVector out{reg, v.cutoff, std::vector<Complex>(v.amps.size())};
  const Layout lay(v);
  std::vector<int> sp, ns, moved(lay.modes);
  for (std::size_t idx = 0; idx < v.amps.size(); ++idx) {
    lay.decode(idx, sp, ns);
    for (std::size_t m = 0; m < lay.modes; ++m) moved[target[m]] = ns[m];
    out.amps[lay.encode(sp, moved)] = v.amps[idx];
  }
  return out;
}

FockVector apply_bs_fock(const FockVector& v, ModeId i, ModeId j) {
  if (i == j) throw SameMode("beam splitter needs two distinct modes");
  const std::size_t si = v.registry.require_mode(i), sj = v.registry.require_mode(j);
  const Layout lay(v);
  const std::size_t stride_i = lay.mode_stride(si), stride_j = lay.mode_stride(sj);
  const int n_max = v.cutoff;
  const auto blocks = bs_blocks(n_max);

  FockVector out{v.registry, v.cutoff, std::vector<Complex>(v.amps.size())};
  double leaked = 0.0;
  std::vector<int> sp, ns;
  Eigen::VectorXcd x, y;
  for (std::size_t idx = 0; idx < v.amps.size(); ++idx) {
    lay.decode(idx, sp, ns);
    if (ns[si] != 0 || ns[sj] != 0) continue;
    for (int n = 0; n <= 2 * n_max; ++n) {
      const int k_lo = std::max(0, n - n_max), k_hi = std::min(n, n_max);
      x = Eigen::VectorXcd::Zero(n + 1);
      bool any = false;
      for (int k = k_lo; k <= k_hi; ++k) {
        x(k) = v.amps[idx + static_cast<std::size_t>(k) * stride_i + static_cast<std::size_t>(n - k) * stride_j];
        any = any || x(k) != Complex{};
      }
      if (!any) continue;
      y = (*blocks)[static_cast<std::size_t>(n)].cast<Complex>() * x;
      for (int k = 0; k <= n; ++k) {
        if (k < k_lo || k > k_hi) {
          leaked += std::norm(y(k));
          continue;
        }
        out.amps[idx + static_cast<std::size_t>(k) * stride_i + static_cast<std::size_t>(n - k) * stride_j] = y(k);
      }
    }
  }
  if (leaked > kLeakTolerance)
    throw CutoffTooSmall("beam splitter pushes weight " + std::to_string(leaked) + " past cutoff " +
                         std::to_string(n_max));
  return out;
}

FockVector apply_cp_fock(const FockVector& v, SpinId spin, ModeId mode) {
  const std::size_t s = v.registry.require_spin(spin), m = v.registry.require_mode(mode);
  const Layout lay(v);
  FockVector out = v;
  std::vector<int> sp, ns;
  for (std::size_t idx = 0; idx < v.amps.size(); ++idx) {
    lay.decode(idx, sp, ns);
    if (sp[s] == static_cast<int>(Spin::Down) && ns[m] % 2 == 1) out.amps[idx] = -out.amps[idx];
  }
  return out;
}

FockVector apply_mw_fock(const FockVector& v, SpinId spin) {
  const std::size_t s = v.registry.require_spin(spin);
  const Layout lay(v);
  const std::size_t stride = lay.spin_stride(s);
  const double h = 1.0 / std::numbers::sqrt2;
  FockVector out = v;
  std::vector<int> sp, ns;
  for (std::size_t idx = 0; idx < v.amps.size(); ++idx) {
    lay.decode(idx, sp, ns);
    if (sp[s] != static_cast<int>(Spin::Up)) continue;
    const Complex up = v.amps[idx], down = v.amps[idx + stride];
    out.amps[idx] = h * (up + down);
    out.amps[idx + stride] = h * (up - down);
  }
  return out;
}

double cross_validate(const HybridKet& ket, int cutoff) {
  const FockVector whole = embed(ket, cutoff);
  double worst = std::abs(norm(whole) - states::norm(ket));

  std::vector<FockVector> parts;
  for (const auto& t : ket.terms()) parts.push_back(embed(HybridKet(ket.registry(), {CoherentTerm{1.0, t.label}}), cutoff));
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (std::size_t l = k; l < parts.size(); ++l) {
      const Complex analytic = label_overlap(ket.terms()[k].label, ket.terms()[l].label);
      worst = std::max(worst, std::abs(inner(parts[k], parts[l]) - analytic));
    }
  return worst;
}

FockStages fock_stages(double alpha, const InputQubit& q, int cutoff) {
  q.validate();
  const double h = 1.0 / std::numbers::sqrt2;
  FockStages st;

  FockVector probe = tensor(spin_basis(kBobSpin, h, h), coherent_vector(kProbeMode, alpha, cutoff));
  st.channel = relabel_mode(apply_cp_fock(probe, kBobSpin, kProbeMode), kProbeMode, kChannelMode);

  FockVector input = coherent_vector(kInputMode, q.beta, cutoff);
  const FockVector minus = coherent_vector(kInputMode, -q.beta, cutoff);
  for (std::size_t n = 0; n < input.amps.size(); ++n) input.amps[n] = q.a * input.amps[n] + q.b * minus.amps[n];
  const double nrm = norm(input);
  if (nrm < kZeroNormThreshold) throw ZeroNorm("input qubit vanishes");
  for (auto& a : input.amps) a /= nrm;

  FockVector s = apply_bs_fock(tensor(st.channel, input), kChannelMode, kInputMode);
  st.after_split = relabel_mode(relabel_mode(s, kChannelMode, kSplitModeA), kInputMode, kSplitModeB);

  s = tensor(tensor(st.after_split, spin_basis(kAncillaSpinA, h, h)), spin_basis(kAncillaSpinB, h, h));
  s = apply_cp_fock(apply_cp_fock(s, kAncillaSpinA, kSplitModeA), kAncillaSpinB, kSplitModeB);
  st.after_cp = relabel_mode(relabel_mode(s, kSplitModeA, kDetectModeA), kSplitModeB, kDetectModeB);
  st.final_state = apply_mw_fock(apply_mw_fock(st.after_cp, kAncillaSpinA), kAncillaSpinB);
  return st;
}

std::vector<double> hermite_functions(int nmax, double x) {
  std::vector<double> psi(static_cast<std::size_t>(nmax) + 1);
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (nmax >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n < nmax; ++n)
    psi[static_cast<std::size_t>(n + 1)] = std::sqrt(2.0 / (n + 1)) * x * psi[static_cast<std::size_t>(n)] -
                                           std::sqrt(double(n) / (n + 1)) * psi[static_cast<std::size_t>(n - 1)];
  return psi;
}

std::vector<double> position_density(const FockVector& v, ModeId mode, const std::vector<double>& xs) {
  const std::size_t m = v.registry.require_mode(mode);
  const Layout lay(v);
  const std::size_t stride = lay.mode_stride(m);
  const double total = std::pow(norm(v), 2);
  if (total < kZeroNormThreshold) throw ZeroNorm("position density of a null vector");

  std::vector<std::size_t> bases;
  std::vector<int> sp, ns;
  for (std::size_t idx = 0; idx < v.amps.size(); ++idx) {
    lay.decode(idx, sp, ns);
    if (ns[m] == 0) bases.push_back(idx);
  }
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const auto psi = hermite_functions(v.cutoff, x);
    double acc = 0.0;
    for (std::size_t base : bases) {
      Complex amp = 0.0;
      for (int n = 0; n <= v.cutoff; ++n) amp += v.amps[base + static_cast<std::size_t>(n) * stride] * psi[static_cast<std::size_t>(n)];
      acc += std::norm(amp);
    }
    out.push_back(acc / total);
  }
  return out;
}

}  // namespace cvdv::fock
