#pragma once

// Exact algebra over finite superpositions of multimode coherent states
// tensored with spin registers.
//
// A HybridKet is a list of terms c_k |s_k>|beta_k>, where s_k assigns
// up/down to every registered spin and beta_k assigns a coherent amplitude to
// every registered optical mode. Every term of one ket shares the same
// Registry. All values are immutable after construction; operations return
// new values.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvdv/errors.hpp"
#include "cvdv/types.hpp"

namespace cvdv::states {

inline constexpr double kDedupTolerance = 1e-12;
inline constexpr double kZeroNormThreshold = 1e-14;

// The shared index sets of a ket or mixture, each kept sorted ascending.
struct Registry {
  std::vector<SpinId> spins;
  std::vector<ModeId> modes;

  bool operator==(const Registry&) const = default;

  std::optional<std::size_t> spin_slot(SpinId id) const;
  std::optional<std::size_t> mode_slot(ModeId id) const;

  // Throw UnknownIndex when absent.
  std::size_t require_spin(SpinId id) const;
  std::size_t require_mode(ModeId id) const;

  bool empty() const { return spins.empty() && modes.empty(); }
  std::string describe() const;
};

// Spin configuration and coherent amplitudes of one product ket, aligned
// slot-by-slot with a Registry.
struct BasisLabel {
  std::vector<Spin> spins;
  std::vector<Complex> modes;

  bool operator==(const BasisLabel&) const = default;
};

struct CoherentTerm {
  Complex coeff;
  BasisLabel label;
};

class HybridKet {
 public:
  // The zero vector on an empty registry.
  HybridKet() = default;

  // Validates that every label matches the registry shape and that all
  // numbers are finite. Terms are deduplicated.
  HybridKet(Registry registry, std::vector<CoherentTerm> terms);

  // The scalar 1 (empty registry, one term). Neutral element of tensor().
  static HybridKet unit();
  static HybridKet spin(SpinId id, Complex up, Complex down);
  static HybridKet coherent(ModeId id, Complex alpha);
  // plus * |amplitude> + minus * |-amplitude>, unnormalized.
  static HybridKet coherent_pair(ModeId id, Complex amplitude, Complex plus, Complex minus);

  const Registry& registry() const { return registry_; }
  std::span<const CoherentTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  HybridKet scaled(Complex factor) const;

  // Sum of two kets on the same registry.
  HybridKet operator+(const HybridKet& other) const;

 private:
  Registry registry_;
  std::vector<CoherentTerm> terms_;
};

// One |ket><bra| product with a complex weight.
struct Dyad {
  Complex weight;
  BasisLabel ket;
  BasisLabel bra;
};

// How the partial trace over an optical mode evaluates int dy <y|a><b|y>.
enum class TraceConvention {
  // The loss-mode result used in the noisy derivation: <-ra|ra> -> exp(-(ra)^2)
  // for real amplitudes. Equivalent to the coherent overlap of amplitudes
  // scaled by 1/sqrt(2).
  AppendixA,
  // The exact coherent-state overlap <b|a>; gives exp(-2(ra)^2).
  Standard,
};

std::string to_string(TraceConvention c);

class HybridMixture {
 public:
  HybridMixture() = default;
  HybridMixture(Registry registry, std::vector<Dyad> dyads);

  static HybridMixture from_ket(const HybridKet& ket);

  const Registry& registry() const { return registry_; }
  std::span<const Dyad> dyads() const { return dyads_; }
  std::size_t size() const { return dyads_.size(); }

  // sum_d weight_d * <bra_d|ket_d>
  Complex trace() const;
  HybridMixture normalized() const;
  HybridMixture scaled(Complex factor) const;
  HybridMixture operator+(const HybridMixture& other) const;

  // Every dyad has its conjugate-transposed partner with conjugated weight.
  bool is_hermitian(double tol = 1e-10) const;

 private:
  Registry registry_;
  std::vector<Dyad> dyads_;
};

// <alpha|beta> for coherent states.
Complex coherent_overlap(Complex alpha, Complex beta);

// <x|beta> with x the position quadrature of variance 1/2:
// pi^(-1/4) exp(-(x-q0)^2/2 + i p0 x - i p0 q0/2), q0 = sqrt(2) Re beta,
// p0 = sqrt(2) Im beta.
Complex position_amplitude(Complex beta, double x);

// Kronecker delta on spins times the product of per-mode coherent overlaps.
Complex label_overlap(const BasisLabel& bra, const BasisLabel& ket);

Complex inner_product(const HybridKet& bra, const HybridKet& ket);
double norm(const HybridKet& ket);

// Throws ZeroNorm when the norm is below 1e-14.
HybridKet normalize(const HybridKet& ket);

// Throws RegistryCollision when the registries share an index.
HybridKet tensor(const HybridKet& left, const HybridKet& right);
HybridMixture tensor(const HybridMixture& left, const HybridMixture& right);

HybridKet relabel_mode(const HybridKet& ket, ModeId from, ModeId to);
HybridMixture relabel_mode(const HybridMixture& mix, ModeId from, ModeId to);

// Keep the terms with `value` at `spin` and drop the spin from the registry.
// Result is unnormalized.
HybridKet project_spin(const HybridKet& ket, SpinId spin, Spin value);

// Keep the dyads with `value` at `spin` on both sides and drop the spin.
HybridMixture project_spin(const HybridMixture& mix, SpinId spin, Spin value);

// Contract `mode` with the position eigenstate <x|; drops the mode. Result is
// unnormalized.
HybridKet project_mode_position(const HybridKet& ket, ModeId mode, double x);

// Contract `mode` with <gamma| on the ket side and |gamma> on the bra side.
HybridMixture project_mode_coherent(const HybridMixture& mix, ModeId mode, Complex gamma);

// Trace over an optical mode. Each dyad weight is multiplied by the
// convention's overlap of its (bra, ket) amplitudes on that mode.
HybridMixture partial_trace_mode(const HybridMixture& mix, ModeId mode,
                                 TraceConvention convention = TraceConvention::AppendixA);
HybridMixture partial_trace_spin(const HybridMixture& mix, SpinId spin);

// Reduced state of a single spin, tracing every mode with the standard
// overlap and every other spin.
SpinDensity reduced_spin_density(const HybridKet& ket, SpinId spin);

// The 2x2 matrix of a mixture whose registry holds exactly one spin.
SpinDensity spin_density(const HybridMixture& mix);

// Amplitudes of a ket whose registry holds exactly one spin and no modes.
SpinVector spin_vector(const HybridKet& ket);

// tr(A B) for mixtures on the same registry.
Complex hs_inner(const HybridMixture& a, const HybridMixture& b);

// Hilbert-Schmidt distance ||A - B||_2.
double hs_distance(const HybridMixture& a, const HybridMixture& b);

// Smallest eigenvalue of the mixture restricted to the span of its labels.
double min_eigenvalue(const HybridMixture& mix);

}  // namespace cvdv::states

namespace cvdv {
using states::BasisLabel;
using states::CoherentTerm;
using states::Dyad;
using states::HybridKet;
using states::HybridMixture;
using states::Registry;
using states::TraceConvention;
using states::kDedupTolerance;
using states::kZeroNormThreshold;
}  // namespace cvdv
