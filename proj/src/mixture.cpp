#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "cvdv/states.hpp"
#include "states_internal.hpp"

namespace cvdv::states {

namespace detail {

std::vector<Dyad> dedup_dyads(std::vector<Dyad> dyads) {
  std::map<std::pair<LabelKey, LabelKey>, std::size_t> index;
  std::vector<Dyad> out;
  out.reserve(dyads.size());
  for (auto& d : dyads) {
    auto [it, inserted] = index.try_emplace({make_key(d.ket), make_key(d.bra)}, out.size());
    if (inserted)
      out.push_back(std::move(d));
    else
      out[it->second].weight += d.weight;
  }
  std::erase_if(out, [](const Dyad& d) { return d.weight == Complex{}; });
  return out;
}

}  // namespace detail

std::string to_string(TraceConvention c) {
  return c == TraceConvention::AppendixA ? "appendix_a" : "standard";
}

HybridMixture::HybridMixture(Registry registry, std::vector<Dyad> dyads) : registry_(std::move(registry)) {
  detail::validate_registry(registry_);
  for (const auto& d : dyads) {
    detail::validate_label(registry_, d.ket);
    detail::validate_label(registry_, d.bra);
    if (!detail::is_finite(d.weight)) throw std::invalid_argument("non-finite dyad weight");
  }
  dyads_ = detail::dedup_dyads(std::move(dyads));
}

HybridMixture HybridMixture::from_ket(const HybridKet& ket) {
  std::vector<Dyad> dyads;
  dyads.reserve(ket.size() * ket.size());
  for (const auto& k : ket.terms())
    for (const auto& b : ket.terms()) dyads.push_back({k.coeff * std::conj(b.coeff), k.label, b.label});
  return HybridMixture(ket.registry(), std::move(dyads));
}

Complex HybridMixture::trace() const {
  Complex acc = 0.0;
  for (const auto& d : dyads_) acc += d.weight * label_overlap(d.bra, d.ket);
  return acc;
}

HybridMixture HybridMixture::scaled(Complex factor) const {
  std::vector<Dyad> dyads(dyads_.begin(), dyads_.end());
  for (auto& d : dyads) d.weight *= factor;
  return HybridMixture(registry_, std::move(dyads));
}

HybridMixture HybridMixture::normalized() const {
  const Complex tr = trace();
  if (std::abs(tr) < kZeroNormThreshold) throw ZeroNorm("mixture trace vanishes");
  return scaled(1.0 / tr.real());
}

HybridMixture HybridMixture::operator+(const HybridMixture& other) const {
  if (registry_ != other.registry_)
    throw RegistryMismatch(registry_.describe() + " vs " + other.registry_.describe());
  std::vector<Dyad> dyads(dyads_.begin(), dyads_.end());
  dyads.insert(dyads.end(), other.dyads_.begin(), other.dyads_.end());
  return HybridMixture(registry_, std::move(dyads));
}

bool HybridMixture::is_hermitian(double tol) const {
  std::map<std::pair<detail::LabelKey, detail::LabelKey>, Complex> weights;
  for (const auto& d : dyads_) weights[{detail::make_key(d.ket), detail::make_key(d.bra)}] += d.weight;
  for (const auto& [key, w] : weights) {
    auto it = weights.find({key.second, key.first});
    const Complex partner = it == weights.end() ? Complex{} : it->second;
    if (std::abs(partner - std::conj(w)) > tol * std::max(1.0, std::abs(w))) return false;
  }
  return true;
}

HybridMixture tensor(const HybridMixture& left, const HybridMixture& right) {
  const auto plan = detail::plan_merge(left.registry(), right.registry());
  std::vector<Dyad> dyads;
  dyads.reserve(left.size() * right.size());
  for (const auto& l : left.dyads())
    for (const auto& r : right.dyads())
      dyads.push_back({l.weight * r.weight, detail::merge_labels(plan, l.ket, r.ket),
                       detail::merge_labels(plan, l.bra, r.bra)});
  return HybridMixture(plan.merged, std::move(dyads));
}

HybridMixture relabel_mode(const HybridMixture& mix, ModeId from, ModeId to) {
  const auto plan = detail::plan_relabel(mix.registry(), from, to);
  std::vector<Dyad> dyads;
  dyads.reserve(mix.size());
  for (const auto& d : mix.dyads())
    dyads.push_back({d.weight, detail::apply_relabel(plan, d.ket), detail::apply_relabel(plan, d.bra)});
  return HybridMixture(plan.registry, std::move(dyads));
}

namespace {

template <class WeightFn>
HybridMixture contract_mode(const HybridMixture& mix, ModeId mode, WeightFn factor) {
  const std::size_t slot = mix.registry().require_mode(mode);
  Registry reg = mix.registry();
  reg.modes.erase(reg.modes.begin() + static_cast<std::ptrdiff_t>(slot));
  std::vector<Dyad> dyads;
  dyads.reserve(mix.size());
  for (const auto& d : mix.dyads()) {
    Dyad out = d;
    out.weight *= factor(d.ket.modes[slot], d.bra.modes[slot]);
    detail::erase_mode_slot(out.ket, slot);
    detail::erase_mode_slot(out.bra, slot);
    dyads.push_back(std::move(out));
  }
  return HybridMixture(std::move(reg), std::move(dyads));
}

}  // namespace

HybridMixture project_mode_coherent(const HybridMixture& mix, ModeId mode, Complex gamma) {
  return contract_mode(mix, mode, [gamma](Complex ket_amp, Complex bra_amp) {
    return coherent_overlap(gamma, ket_amp) * coherent_overlap(bra_amp, gamma);
  });
}

HybridMixture partial_trace_mode(const HybridMixture& mix, ModeId mode, TraceConvention convention) {
  if (convention == TraceConvention::Standard)
    return contract_mode(mix, mode, [](Complex ket_amp, Complex bra_amp) { return coherent_overlap(bra_amp, ket_amp); });
  const double s = 1.0 / std::sqrt(2.0);
  return contract_mode(mix, mode, [s](Complex ket_amp, Complex bra_amp) {
    return coherent_overlap(s * bra_amp, s * ket_amp);
  });
}

HybridMixture partial_trace_spin(const HybridMixture& mix, SpinId spin) {
  const std::size_t slot = mix.registry().require_spin(spin);
  Registry reg = mix.registry();
  reg.spins.erase(reg.spins.begin() + static_cast<std::ptrdiff_t>(slot));
  std::vector<Dyad> dyads;
  for (const auto& d : mix.dyads()) {
    if (d.ket.spins[slot] != d.bra.spins[slot]) continue;
    Dyad out = d;
    detail::erase_spin_slot(out.ket, slot);
    detail::erase_spin_slot(out.bra, slot);
    dyads.push_back(std::move(out));
  }
  return HybridMixture(std::move(reg), std::move(dyads));
}

HybridMixture project_spin(const HybridMixture& mix, SpinId spin, Spin value) {
  const std::size_t slot = mix.registry().require_spin(spin);
  Registry reg = mix.registry();
  reg.spins.erase(reg.spins.begin() + static_cast<std::ptrdiff_t>(slot));
  std::vector<Dyad> dyads;
  for (const auto& d : mix.dyads()) {
    if (d.ket.spins[slot] != value || d.bra.spins[slot] != value) continue;
    Dyad out = d;
    detail::erase_spin_slot(out.ket, slot);
    detail::erase_spin_slot(out.bra, slot);
    dyads.push_back(std::move(out));
  }
  return HybridMixture(std::move(reg), std::move(dyads));
}

SpinDensity spin_density(const HybridMixture& mix) {
  const auto& reg = mix.registry();
  if (reg.spins.size() != 1 || !reg.modes.empty())
    throw RegistryMismatch("expected a single-spin mixture, got " + reg.describe());
  SpinDensity rho;
  for (const auto& d : mix.dyads())
    rho.m[static_cast<int>(d.ket.spins[0])][static_cast<int>(d.bra.spins[0])] += d.weight;
  return rho;
}

SpinDensity reduced_spin_density(const HybridKet& ket, SpinId spin) {
  ket.registry().require_spin(spin);
  HybridMixture mix = HybridMixture::from_ket(ket);
  for (ModeId m : ket.registry().modes) mix = partial_trace_mode(mix, m, TraceConvention::Standard);
  for (SpinId s : ket.registry().spins)
    if (s != spin) mix = partial_trace_spin(mix, s);
  return spin_density(mix);
}

Complex hs_inner(const HybridMixture& a, const HybridMixture& b) {
  if (a.registry() != b.registry())
    throw RegistryMismatch(a.registry().describe() + " vs " + b.registry().describe());
  Complex acc = 0.0;
  for (const auto& da : a.dyads())
    for (const auto& db : b.dyads())
      acc += da.weight * db.weight * label_overlap(da.bra, db.ket) * label_overlap(db.bra, da.ket);
  return acc;
}

double hs_distance(const HybridMixture& a, const HybridMixture& b) {
  const double d2 = (hs_inner(a, a) + hs_inner(b, b) - 2.0 * hs_inner(a, b)).real();
  return std::sqrt(std::max(0.0, d2));
}

double min_eigenvalue(const HybridMixture& mix) {
  std::map<detail::LabelKey, std::size_t> index;
  std::vector<BasisLabel> labels;
  auto slot_of = [&](const BasisLabel& l) {
    auto [it, inserted] = index.try_emplace(detail::make_key(l), labels.size());
    if (inserted) labels.push_back(l);
    return it->second;
  };
  std::vector<std::tuple<std::size_t, std::size_t, Complex>> entries;
  for (const auto& d : mix.dyads()) entries.emplace_back(slot_of(d.ket), slot_of(d.bra), d.weight);

  const auto n = static_cast<Eigen::Index>(labels.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  for (auto& [i, j, v] : entries) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v;
  Eigen::MatrixXcd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      gram(i, j) = label_overlap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gram_eig(gram);
  Eigen::VectorXd root = gram_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXcd g_half = gram_eig.eigenvectors() * root.asDiagonal() * gram_eig.eigenvectors().adjoint();
  Eigen::MatrixXcd m = g_half * w * g_half;
  Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace cvdv::states
