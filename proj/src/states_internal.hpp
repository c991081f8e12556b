#pragma once

// Helpers shared by the ket and mixture implementations.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "cvdv/states.hpp"

namespace cvdv::states::detail {

// Hashable form of a label: spins plus amplitudes rounded to the dedup grid.
struct LabelKey {
  std::vector<std::uint8_t> spins;
  std::vector<std::int64_t> amps;

  auto operator<=>(const LabelKey&) const = default;
};

inline LabelKey make_key(const BasisLabel& label) {
  LabelKey key;
  key.spins.reserve(label.spins.size());
  for (Spin s : label.spins) key.spins.push_back(static_cast<std::uint8_t>(s));
  key.amps.reserve(2 * label.modes.size());
  for (const Complex& a : label.modes) {
    key.amps.push_back(std::llround(a.real() / kDedupTolerance));
    key.amps.push_back(std::llround(a.imag() / kDedupTolerance));
  }
  return key;
}

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void validate_registry(const Registry& reg);
void validate_label(const Registry& reg, const BasisLabel& label);

std::vector<CoherentTerm> dedup_terms(std::vector<CoherentTerm> terms);
std::vector<Dyad> dedup_dyads(std::vector<Dyad> dyads);

// Slot layout of the union of two disjoint registries: for each merged slot,
// whether it comes from the right operand and its index there.
struct MergePlan {
  Registry merged;
  std::vector<std::pair<bool, std::size_t>> spin_src;
  std::vector<std::pair<bool, std::size_t>> mode_src;
};

MergePlan plan_merge(const Registry& left, const Registry& right);
BasisLabel merge_labels(const MergePlan& plan, const BasisLabel& left, const BasisLabel& right);

// Registry with `from` renamed to `to`, plus the old slot of each new slot.
struct RelabelPlan {
  Registry registry;
  std::vector<std::size_t> mode_from;
};

RelabelPlan plan_relabel(const Registry& reg, ModeId from, ModeId to);
BasisLabel apply_relabel(const RelabelPlan& plan, const BasisLabel& label);

inline void erase_spin_slot(BasisLabel& label, std::size_t slot) {
  label.spins.erase(label.spins.begin() + static_cast<std::ptrdiff_t>(slot));
}
inline void erase_mode_slot(BasisLabel& label, std::size_t slot) {
  label.modes.erase(label.modes.begin() + static_cast<std::ptrdiff_t>(slot));
}

}  // namespace cvdv::states::detail
