#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvdv/states.hpp"
#include "states_internal.hpp"

namespace cvdv::states {

namespace detail {

void validate_registry(const Registry& reg) {
  if (!std::is_sorted(reg.spins.begin(), reg.spins.end()) ||
      std::adjacent_find(reg.spins.begin(), reg.spins.end()) != reg.spins.end())
    throw RegistryMismatch("spin registry must be sorted and unique: " + reg.describe());
  if (!std::is_sorted(reg.modes.begin(), reg.modes.end()) ||
      std::adjacent_find(reg.modes.begin(), reg.modes.end()) != reg.modes.end())
    throw RegistryMismatch("mode registry must be sorted and unique: " + reg.describe());
}

void validate_label(const Registry& reg, const BasisLabel& label) {
  if (label.spins.size() != reg.spins.size() || label.modes.size() != reg.modes.size())
    throw RegistryMismatch("label shape does not match registry " + reg.describe());
  for (const Complex& a : label.modes)
    if (!is_finite(a)) throw std::invalid_argument("non-finite coherent amplitude");
}

std::vector<CoherentTerm> dedup_terms(std::vector<CoherentTerm> terms) {
  std::map<LabelKey, std::size_t> index;
  std::vector<CoherentTerm> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    auto [it, inserted] = index.try_emplace(make_key(t.label), out.size());
    if (inserted)
      out.push_back(std::move(t));
    else
      out[it->second].coeff += t.coeff;
  }
  std::erase_if(out, [](const CoherentTerm& t) { return t.coeff == Complex{}; });
  return out;
}

MergePlan plan_merge(const Registry& left, const Registry& right) {
  MergePlan plan;
  for (SpinId s : left.spins)
    if (right.spin_slot(s)) throw RegistryCollision("spin " + to_string(s) + " on both sides");
  for (ModeId m : left.modes)
    if (right.mode_slot(m)) throw RegistryCollision("mode " + to_string(m) + " on both sides");

  std::size_t i = 0, j = 0;
  while (i < left.spins.size() || j < right.spins.size()) {
    if (j == right.spins.size() || (i < left.spins.size() && left.spins[i] < right.spins[j])) {
      plan.merged.spins.push_back(left.spins[i]);
      plan.spin_src.emplace_back(false, i++);
    } else {
      plan.merged.spins.push_back(right.spins[j]);
      plan.spin_src.emplace_back(true, j++);
    }
  }
  i = j = 0;
  while (i < left.modes.size() || j < right.modes.size()) {
    if (j == right.modes.size() || (i < left.modes.size() && left.modes[i] < right.modes[j])) {
      plan.merged.modes.push_back(left.modes[i]);
      plan.mode_src.emplace_back(false, i++);
    } else {
      plan.merged.modes.push_back(right.modes[j]);
      plan.mode_src.emplace_back(true, j++);
    }
  }
  return plan;
}

BasisLabel merge_labels(const MergePlan& plan, const BasisLabel& left, const BasisLabel& right) {
  BasisLabel out;
  out.spins.reserve(plan.spin_src.size());
  out.modes.reserve(plan.mode_src.size());
  for (auto [from_right, k] : plan.spin_src) out.spins.push_back(from_right ? right.spins[k] : left.spins[k]);
  for (auto [from_right, k] : plan.mode_src) out.modes.push_back(from_right ? right.modes[k] : left.modes[k]);
  return out;
}

RelabelPlan plan_relabel(const Registry& reg, ModeId from, ModeId to) {
  const std::size_t src = reg.require_mode(from);
  if (from != to && reg.mode_slot(to)) throw RegistryCollision("mode " + to_string(to) + " already present");
  std::vector<std::pair<ModeId, std::size_t>> order;
  for (std::size_t k = 0; k < reg.modes.size(); ++k) order.emplace_back(k == src ? to : reg.modes[k], k);
  std::sort(order.begin(), order.end());
  RelabelPlan plan;
  plan.registry.spins = reg.spins;
  for (auto& [id, k] : order) {
    plan.registry.modes.push_back(id);
    plan.mode_from.push_back(k);
  }
  return plan;
}

BasisLabel apply_relabel(const RelabelPlan& plan, const BasisLabel& label) {
  BasisLabel out;
  out.spins = label.spins;
  out.modes.reserve(plan.mode_from.size());
  for (std::size_t k : plan.mode_from) out.modes.push_back(label.modes[k]);
  return out;
}

}  // namespace detail

std::optional<std::size_t> Registry::spin_slot(SpinId id) const {
  auto it = std::lower_bound(spins.begin(), spins.end(), id);
  if (it == spins.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - spins.begin());
}

std::optional<std::size_t> Registry::mode_slot(ModeId id) const {
  auto it = std::lower_bound(modes.begin(), modes.end(), id);
  if (it == modes.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - modes.begin());
}

std::size_t Registry::require_spin(SpinId id) const {
  if (auto slot = spin_slot(id)) return *slot;
  throw UnknownIndex("spin " + to_string(id) + " not in registry " + describe());
}

std::size_t Registry::require_mode(ModeId id) const {
  if (auto slot = mode_slot(id)) return *slot;
  throw UnknownIndex("mode " + to_string(id) + " not in registry " + describe());
}

std::string Registry::describe() const {
  std::ostringstream os;
  os << "{spins:";
  for (SpinId s : spins) os << ' ' << s.value;
  os << "; modes:";
  for (ModeId m : modes) os << ' ' << to_string(m);
  os << '}';
  return os.str();
}

HybridKet::HybridKet(Registry registry, std::vector<CoherentTerm> terms) : registry_(std::move(registry)) {
  detail::validate_registry(registry_);
  for (const auto& t : terms) {
    detail::validate_label(registry_, t.label);
    if (!detail::is_finite(t.coeff)) throw std::invalid_argument("non-finite term coefficient");
  }
  terms_ = detail::dedup_terms(std::move(terms));
}

HybridKet HybridKet::unit() { return HybridKet(Registry{}, {CoherentTerm{1.0, {}}}); }

HybridKet HybridKet::spin(SpinId id, Complex up, Complex down) {
  Registry reg{{id}, {}};
  return HybridKet(reg, {CoherentTerm{up, {{Spin::Up}, {}}}, CoherentTerm{down, {{Spin::Down}, {}}}});
}

HybridKet HybridKet::coherent(ModeId id, Complex alpha) {
  return HybridKet(Registry{{}, {id}}, {CoherentTerm{1.0, {{}, {alpha}}}});
}

HybridKet HybridKet::coherent_pair(ModeId id, Complex amplitude, Complex plus, Complex minus) {
  return HybridKet(Registry{{}, {id}},
                   {CoherentTerm{plus, {{}, {amplitude}}}, CoherentTerm{minus, {{}, {-amplitude}}}});
}

HybridKet HybridKet::scaled(Complex factor) const {
  std::vector<CoherentTerm> terms(terms_.begin(), terms_.end());
  for (auto& t : terms) t.coeff *= factor;
  return HybridKet(registry_, std::move(terms));
}

HybridKet HybridKet::operator+(const HybridKet& other) const {
  if (registry_ != other.registry_)
    throw RegistryMismatch(registry_.describe() + " vs " + other.registry_.describe());
  std::vector<CoherentTerm> terms(terms_.begin(), terms_.end());
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return HybridKet(registry_, std::move(terms));
}

Complex coherent_overlap(Complex alpha, Complex beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

Complex position_amplitude(Complex beta, double x) {
  static const double kPrefactor = std::pow(std::numbers::pi, -0.25);
  const double q0 = std::numbers::sqrt2 * beta.real();
  const double p0 = std::numbers::sqrt2 * beta.imag();
  const double d = x - q0;
  return kPrefactor * std::exp(Complex(-0.5 * d * d, p0 * x - 0.5 * p0 * q0));
}

Complex label_overlap(const BasisLabel& bra, const BasisLabel& ket) {
  if (bra.spins != ket.spins) return 0.0;
  Complex acc = 1.0;
  for (std::size_t k = 0; k < bra.modes.size(); ++k) acc *= coherent_overlap(bra.modes[k], ket.modes[k]);
  return acc;
}

Complex inner_product(const HybridKet& bra, const HybridKet& ket) {
  if (bra.registry() != ket.registry())
    throw RegistryMismatch(bra.registry().describe() + " vs " + ket.registry().describe());
  Complex acc = 0.0;
  for (const auto& b : bra.terms())
    for (const auto& k : ket.terms()) acc += std::conj(b.coeff) * k.coeff * label_overlap(b.label, k.label);
  return acc;
}

double norm(const HybridKet& ket) { return std::sqrt(std::max(0.0, inner_product(ket, ket).real())); }

HybridKet normalize(const HybridKet& ket) {
  const double n = norm(ket);
  if (n < kZeroNormThreshold) throw ZeroNorm("norm " + std::to_string(n) + " below threshold");
  return ket.scaled(1.0 / n);
}

HybridKet tensor(const HybridKet& left, const HybridKet& right) {
  const auto plan = detail::plan_merge(left.registry(), right.registry());
  std::vector<CoherentTerm> terms;
  terms.reserve(left.size() * right.size());
  for (const auto& l : left.terms())
    for (const auto& r : right.terms())
      terms.push_back({l.coeff * r.coeff, detail::merge_labels(plan, l.label, r.label)});
  return HybridKet(plan.merged, std::move(terms));
}

HybridKet relabel_mode(const HybridKet& ket, ModeId from, ModeId to) {
  const auto plan = detail::plan_relabel(ket.registry(), from, to);
  std::vector<CoherentTerm> terms;
  terms.reserve(ket.size());
  for (const auto& t : ket.terms()) terms.push_back({t.coeff, detail::apply_relabel(plan, t.label)});
  return HybridKet(plan.registry, std::move(terms));
}

HybridKet project_spin(const HybridKet& ket, SpinId spin, Spin value) {
  const std::size_t slot = ket.registry().require_spin(spin);
  Registry reg = ket.registry();
  reg.spins.erase(reg.spins.begin() + static_cast<std::ptrdiff_t>(slot));
  std::vector<CoherentTerm> terms;
  for (const auto& t : ket.terms()) {
    if (t.label.spins[slot] != value) continue;
    CoherentTerm c = t;
    detail::erase_spin_slot(c.label, slot);
    terms.push_back(std::move(c));
  }
  return HybridKet(std::move(reg), std::move(terms));
}

HybridKet project_mode_position(const HybridKet& ket, ModeId mode, double x) {
  const std::size_t slot = ket.registry().require_mode(mode);
  Registry reg = ket.registry();
  reg.modes.erase(reg.modes.begin() + static_cast<std::ptrdiff_t>(slot));
  std::vector<CoherentTerm> terms;
  terms.reserve(ket.size());
  for (const auto& t : ket.terms()) {
    CoherentTerm c = t;
    c.coeff *= position_amplitude(t.label.modes[slot], x);
    detail::erase_mode_slot(c.label, slot);
    terms.push_back(std::move(c));
  }
  return HybridKet(std::move(reg), std::move(terms));
}

SpinVector spin_vector(const HybridKet& ket) {
  const auto& reg = ket.registry();
  if (reg.spins.size() != 1 || !reg.modes.empty())
    throw RegistryMismatch("expected a single-spin ket, got " + reg.describe());
  SpinVector v{};
  for (const auto& t : ket.terms()) (t.label.spins[0] == Spin::Up ? v.up : v.down) += t.coeff;
  return v;
}

}  // namespace cvdv::states
