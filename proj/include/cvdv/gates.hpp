#pragma once

// Unitaries of the protocol acting on HybridKet and HybridMixture.
//
// Every gate maps a product label to a short list of (factor, label)
// branches, so states stay finite superpositions of coherent terms.
// Mixture overloads apply U on the ket side and U^dagger on the bra side.

#include <string_view>

#include "cvdv/states.hpp"

namespace cvdv {

inline constexpr SpinId kBobSpin{1};

enum class CorrectionOp { Identity, PhaseFlip, BitFlip, BitPhaseFlip };

std::string_view to_string(CorrectionOp op);

// Spin down at `spin` negates the amplitude at `mode`; spin up leaves it.
HybridKet apply_cp(const HybridKet& ket, SpinId spin, ModeId mode);
HybridMixture apply_cp(const HybridMixture& mix, SpinId spin, ModeId mode);

// Real 50:50 mixing (a_i, a_j) -> ((a_i + a_j)/sqrt2, (a_i - a_j)/sqrt2).
// Throws SameMode when i == j.
HybridKet apply_beamsplitter(const HybridKet& ket, ModeId i, ModeId j);
HybridMixture apply_beamsplitter(const HybridMixture& mix, ModeId i, ModeId j);

// up -> (up + down)/sqrt2, down -> (up - down)/sqrt2
HybridKet apply_mw_pi2(const HybridKet& ket, SpinId spin);
HybridMixture apply_mw_pi2(const HybridMixture& mix, SpinId spin);

// Correction matrix on one spin, columns indexed (up, down):
//   Identity [[1,0],[0,1]]  PhaseFlip [[1,0],[0,-1]]
//   BitFlip  [[0,1],[1,0]]  BitPhaseFlip [[0,1],[-1,0]]
HybridKet apply_correction(const HybridKet& ket, CorrectionOp op, SpinId spin = kBobSpin);
HybridMixture apply_correction(const HybridMixture& mix, CorrectionOp op, SpinId spin = kBobSpin);
SpinVector apply_correction(const SpinVector& v, CorrectionOp op);
SpinDensity apply_correction(const SpinDensity& rho, CorrectionOp op);

}  // namespace cvdv
