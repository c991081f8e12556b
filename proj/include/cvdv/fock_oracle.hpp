#pragma once

// Brute-force check of the coherent-state calculus: the same states and gates
// on a truncated Fock basis (spin registers tensored with photon numbers
// 0..cutoff per mode).

#include <vector>

#include "cvdv/protocol.hpp"
#include "cvdv/states.hpp"

namespace cvdv::fock {

// Amplitudes indexed with spins first (slot 0 most significant, up = 0) and
// then photon numbers per mode in registry order, each in [0, cutoff].
struct FockVector {
  Registry registry;
  int cutoff = 0;
  std::vector<Complex> amps;

  std::size_t dim() const { return amps.size(); }
};

inline constexpr double kTailTolerance = 1e-12;
inline constexpr double kLeakTolerance = 1e-10;

// ceil(|a|^2 + 10|a| + 20)
int recommended_cutoff(double max_abs_amplitude);

// Poisson weight of |alpha> above the cutoff.
double coherent_tail(Complex alpha, int cutoff);

// Single mode, no spins. Throws CutoffTooSmall when the tail exceeds 1e-12.
FockVector coherent_vector(ModeId mode, Complex alpha, int cutoff);
FockVector spin_basis(SpinId spin, Complex up, Complex down);

Complex overlap_fock(Complex alpha, Complex beta, int cutoff);

// Sum of the ket's terms, each embedded as a product of coherent vectors.
FockVector embed(const HybridKet& ket, int cutoff);

Complex inner(const FockVector& bra, const FockVector& ket);
double norm(const FockVector& v);
// ||a - b|| for vectors on the same layout.
double distance(const FockVector& a, const FockVector& b);

FockVector tensor(const FockVector& left, const FockVector& right);
FockVector relabel_mode(const FockVector& v, ModeId from, ModeId to);

// Number-conserving blocks P_j exp(pi/4 (a_i^dag a_j - a_j^dag a_i)), P_j the
// parity of mode j, matching the real 50:50 convention of apply_beamsplitter.
// Block matrices are cached per cutoff. Throws CutoffTooSmall when more than
// 1e-10 of the norm would leave the truncated space.
FockVector apply_bs_fock(const FockVector& v, ModeId i, ModeId j);
// Multiplies spin-down components by (-1)^n on `mode`.
FockVector apply_cp_fock(const FockVector& v, SpinId spin, ModeId mode);
FockVector apply_mw_fock(const FockVector& v, SpinId spin);

// Worst absolute deviation between analytic and Fock values of the ket's
// norm and of every pairwise overlap of its terms.
double cross_validate(const HybridKet& ket, int cutoff);

struct FockStages {
  FockVector channel;
  FockVector after_split;
  FockVector after_cp;
  FockVector final_state;
};

// The protocol evolved entirely in the Fock basis.
FockStages fock_stages(double alpha, const InputQubit& q, int cutoff);

// psi_0 .. psi_nmax at x, the number-state wavefunctions in the position
// convention of variance 1/2.
std::vector<double> hermite_functions(int nmax, double x);

// Marginal position density of `mode`, normalized by the vector's norm.
std::vector<double> position_density(const FockVector& v, ModeId mode, const std::vector<double>& xs);

}  // namespace cvdv::fock
