#pragma once

// Decoherence while the channel half travels to the sender: dephasing and
// relaxation of spin 1 for a delay tau, and fiber loss modeled as a beam
// splitter onto an environment mode that starts in vacuum.

#include <vector>

#include "cvdv/protocol.hpp"
#include "cvdv/states.hpp"

namespace cvdv {

inline constexpr double kDefaultLightSpeed = 2.998e8;

struct NoiseParams {
  double gamma_phi = 0.0;  // dephasing rate, 1/s
  double gamma = 0.0;      // relaxation rate, 1/s
  double tau = 0.0;        // spin storage time, s
  double l_att = 25.5e3;   // attenuation length, m
  double d0 = 0.0;         // fiber length, m
  double c = kDefaultLightSpeed;

  // tau = d0 / c.
  static NoiseParams from_distance(double gamma_phi, double gamma, double l_att, double d0,
                                   double c = kDefaultLightSpeed);
  // Dimensionless decays and loss amplitude r in [0, 1]; tau is set to 1.
  static NoiseParams from_decays(double gamma_phi_tau, double gamma_tau, double r);

  // Throws std::invalid_argument on negative or NaN fields or l_att <= 0.
  void validate() const;

  double eta_p() const;  // e^{-d0/L_att}
  double r_sq() const;   // 1 - eta_p
  double t() const { return std::sqrt(eta_p()); }
  double r() const { return std::sqrt(r_sq()); }
  double relaxation_factor() const;  // e^{-gamma tau}
  double dephasing_factor() const;   // e^{-(4 gamma_phi + gamma) tau / 2}
};

// Five-dyad state of spin 1, channel mode 4 (amplitudes +-t alpha) and the
// loss mode (amplitudes +-r alpha). Unit trace.
HybridMixture noisy_channel(double alpha, const NoiseParams& p);

struct NoisyStages {
  HybridMixture channel;
  HybridMixture after_split;  // spin 1, modes 6, 7 and loss
  HybridMixture final_state;  // spins 1-3, modes 8, 9 and loss, after the pulses
};

NoisyStages noisy_stages(double alpha, const InputQubit& q, const NoiseParams& p);
HybridMixture noisy_pipeline(double alpha, const InputQubit& q, const NoiseParams& p);

enum class ConditionRoute {
  // Keep the dyads whose detected modes sit exactly on the amplitudes
  // Gamma+ (mode 8) and Gamma- (mode 9) on both sides; the orthogonal-cat
  // limit of the up-up / Upsilon+ / Xi+ projection.
  Ideal,
  // Contract modes 8 and 9 with the coherent projectors |Gamma+><Gamma+| and
  // |Gamma-><Gamma-|, all overlaps kept. Agrees with Ideal once the cats are
  // well separated.
  Projective,
};

// Condition the final mixture on spins 2, 3 up and the mode-8/9 pattern,
// trace the loss mode, return the normalized state of spin 1.
// Gamma+- = (t alpha +- beta)/sqrt2. Throws DegenerateGeometry when
// beta == 0 or t alpha == 0.
SpinDensity condition_and_trace(const HybridMixture& mix, double alpha, double beta, const NoiseParams& p,
                                ConditionRoute route = ConditionRoute::Ideal,
                                TraceConvention convention = TraceConvention::AppendixA);

// Closed form of the teleported state: populations |a|^2 + |b|^2(1 - E) and
// |b|^2 E with E = e^{-gamma tau}; coherence a b* D e^{-k r^2 alpha^2} with
// D the dephasing factor, k = 1 (AppendixA) or 2 (Standard).
SpinDensity teleported_density(const SpinVector& target, double alpha, const NoiseParams& p,
                               TraceConvention convention = TraceConvention::AppendixA);

// 1/2 + E/6 + D e^{-k r^2 alpha^2}/3
double average_fidelity_noisy(const NoiseParams& p, double alpha,
                              TraceConvention convention = TraceConvention::AppendixA);

// Bloch-sphere average of fidelity(teleported_density) by quadrature in
// (cos theta, phi).
double average_fidelity_noisy_quadrature(const NoiseParams& p, double alpha,
                                         TraceConvention convention = TraceConvention::AppendixA, int order = 16);

struct DistanceRow {
  double d0_km;
  double tau_s;
  double r_sq;
  double f_bar;
  double benchmark;
};

// Distances in meters.
std::vector<DistanceRow> fidelity_vs_distance(double alpha, double gamma_phi, double gamma, double l_att, double c,
                                              const std::vector<double>& d0_grid,
                                              TraceConvention convention = TraceConvention::AppendixA);

// Largest fiber length (same unit as l_att) with loss-only average fidelity
// at least f_target: -l_att ln(1 + ln(3F - 2)/(k alpha^2)). Requires
// 2/3 < f_target < 1 and alpha > 0. Throws Unattainable when the required
// r^2 exceeds 1; returns +inf when it equals 1.
double max_distance_for_fidelity(double f_target, double alpha, double l_att,
                                 TraceConvention convention = TraceConvention::AppendixA);

}  // namespace cvdv
