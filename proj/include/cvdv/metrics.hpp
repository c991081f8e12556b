#pragma once

// Fidelity of the teleported spin and its averages over the Bloch sphere and
// over homodyne outcomes.

#include <cstddef>
#include <vector>

#include "cvdv/types.hpp"

namespace cvdv {

// |<target|final>|^2 or <target|rho|target>. Throws NotNormalized when either
// argument is off unit norm (trace) by more than 1e-9.
double fidelity(const SpinVector& final_state, const SpinVector& target);
double fidelity(const SpinDensity& final_state, const SpinVector& target);

inline constexpr int kDefaultBlochOrder = 64;

// Bloch-sphere average of the fidelity of
// N[(a s + b)|up> + (b s + a)|down>] against a|up> + b|down>, where s is the
// ratio of the two homodyne amplitudes. Gauss-Legendre product rule with
// `order` nodes per axis, split into panels at theta = pi/2 and at quarter
// turns of phi so the near-singular line at s = 1 falls on panel edges.
// `order` must be a positive multiple of 4.
double average_fidelity_vs_ratio(double sigma, int order = kDefaultBlochOrder);

// Homodyne amplitudes of the up-up branch at (x8, x9):
// m1 = <x8|Upsilon+> <x9|Xi+>, m2 = <x8|Xi+> <x9|Upsilon+>, cats built on
// (alpha +- beta)/sqrt2, unnormalized, up to a common constant. Returned as
// logarithms so far tails do not underflow.
struct LogAmplitudes {
  double log_m1;
  double log_m2;
};

LogAmplitudes log_homodyne_amplitudes(double alpha, double beta, double x8, double x9);

struct GridAxis {
  double lo = -6.0;
  double hi = 6.0;
  std::size_t points = 101;

  double at(std::size_t i) const;
};

struct FidelityMap {
  double alpha = 0.0;
  double beta = 0.0;
  GridAxis x8;
  GridAxis x9;
  // Row-major, index i8 * x9.points + i9.
  std::vector<double> f_bar;
  std::vector<double> f_bar_o;

  std::size_t index(std::size_t i8, std::size_t i9) const { return i8 * x9.points + i9; }
};

// F_bar = average_fidelity_vs_ratio(m1/m2) and F_bar_o with m2/m1, per cell.
// Throws DegenerateGeometry unless alpha > beta > 0. threads = 0 picks the
// hardware concurrency; the result does not depend on it.
FidelityMap fidelity_map(double alpha, double beta, const GridAxis& x8, const GridAxis& x9,
                         int order = kDefaultBlochOrder, unsigned threads = 0);

struct ProfilePoint {
  double x;
  double weight;
};

// e^{-b^2}[e^{-(x-3b)^2} + e^{-(x+3b)^2}] + e^{-9b^2}[e^{-(x-b)^2} + e^{-(x+b)^2}]
std::vector<ProfilePoint> failure_profile(double beta, const std::vector<double>& xs);

// Same weights divided by the profile's integral over the real line.
std::vector<ProfilePoint> failure_profile_normalized(double beta, const std::vector<double>& xs);

// Best average fidelity for qubits without shared entanglement.
constexpr double classical_benchmark() { return 2.0 / 3.0; }

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

}  // namespace cvdv
