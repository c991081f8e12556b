#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and, where the target supports it, a vectorized variant.
// The public entry points dispatch at runtime to the best variant the CPU
// reports; tests call the variants directly to check equivalence.

#include <span>
#include <string_view>

namespace cvdv::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

// Best variant this binary and CPU can run.
Isa detect_isa();

// Variant used by the dispatching entry points. Defaults to detect_isa(),
// overridable with the CVDV_ISA environment variable (scalar|avx2|neon) or
// force_isa(). Requests for an unavailable variant fall back to Scalar.
Isa active_isa();
void force_isa(Isa isa);

bool isa_available(Isa isa);

// out[i] = sum_j weights[j] * exp(-(xs[i] - centers[j])^2)
// centers and weights must have equal length; out must match xs.
void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out);

// sum_i numer[i] / (a + b * sc[i])
// The Bloch-sphere average of the teleportation fidelity reduces to this
// with numer = w * (sin(t) - sin(t)^3 cos(p)^2), sc = sin(t) cos(p).
double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b);

namespace scalar {
void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out);
double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b);
}  // namespace scalar

#if defined(CVDV_HAVE_AVX2)
namespace avx2 {
void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out);
double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b);
}  // namespace avx2
#endif

#if defined(CVDV_HAVE_NEON)
namespace neon {
void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out);
double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b);
}  // namespace neon
#endif

}  // namespace cvdv::kernels
