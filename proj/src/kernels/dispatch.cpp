#include <atomic>
#include <cstdlib>
#include <string>

#include "cvdv/kernels.hpp"

namespace cvdv::kernels {
namespace {

Isa from_env_or_detect() {
  if (const char* env = std::getenv("CVDV_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (v == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  return detect_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{from_env_or_detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(CVDV_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(CVDV_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  active().store(isa_available(isa) ? isa : Isa::Scalar, std::memory_order_relaxed);
}

void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out) {
  switch (active_isa()) {
#if defined(CVDV_HAVE_AVX2)
    case Isa::Avx2: return avx2::gaussian_sum(xs, centers, weights, out);
#endif
#if defined(CVDV_HAVE_NEON)
    case Isa::Neon: return neon::gaussian_sum(xs, centers, weights, out);
#endif
    default: return scalar::gaussian_sum(xs, centers, weights, out);
  }
}

double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b) {
  switch (active_isa()) {
#if defined(CVDV_HAVE_AVX2)
    case Isa::Avx2: return avx2::rational_sum(numer, sc, a, b);
#endif
#if defined(CVDV_HAVE_NEON)
    case Isa::Neon: return neon::rational_sum(numer, sc, a, b);
#endif
    default: return scalar::rational_sum(numer, sc, a, b);
  }
}

}  // namespace cvdv::kernels
