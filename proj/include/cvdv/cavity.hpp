#pragma once

// Reflection of a weak coherent pulse from a single-sided cavity holding one
// spin, after adiabatic elimination of the cavity field.

#include <string_view>
#include <vector>

#include "cvdv/types.hpp"

namespace cvdv {

// All rates in the same angular-frequency unit. delta_omega = omega_c - omega.
struct CavityParams {
  double g = 0.0;
  double kappa = 1.0;
  double gamma0 = 0.0;
  double eta = 0.0;
  double delta_omega = 0.0;
};

enum class Regime { NoPhaseShift, PiShift, Intermediate };

std::string_view to_string(Regime r);

// r = [4(g^2 - d^2) + gamma0 (eta - kappa) + 2i d (gamma0 + eta - kappa)]
//   / [4(g^2 - d^2) + gamma0 (eta + kappa) + 2i d (gamma0 + eta + kappa)]
// Throws SingularDenominator when |denominator| <= 1e-14 and
// std::invalid_argument when kappa <= 0 or a rate is negative.
Complex reflection_coefficient(const CavityParams& p);

// NoPhaseShift if |r - 1| < tol, PiShift if |r + 1| < tol.
Regime regime_classify(const CavityParams& p, double tol);

// |D|^2 - |N|^2 of the coefficient; nonnegative means |r| <= 1.
double passivity_margin(const CavityParams& p);

struct ReflectionRow {
  double delta_omega;
  double re_r;
  double im_r;
};

// One row per detuning; p.delta_omega is ignored.
std::vector<ReflectionRow> reflection_sweep(const CavityParams& p, const std::vector<double>& deltas);

}  // namespace cvdv
