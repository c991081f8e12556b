// AArch64 only; NEON with float64 lanes is part of the base ISA there.

#include <arm_neon.h>

#include <cassert>
#include <cmath>

#include "cvdv/kernels.hpp"

namespace cvdv::kernels::neon {
namespace {

// Same reduction and polynomial as the AVX2 variant.
inline float64x2_t exp_f64(float64x2_t x) {
  const float64x2_t lo = vdupq_n_f64(-708.39);
  const float64x2_t hi = vdupq_n_f64(709.78);
  const uint64x2_t underflow = vcltq_f64(x, lo);
  x = vmaxq_f64(vminq_f64(x, hi), lo);

  const float64x2_t n = vrndnq_f64(vmulq_n_f64(x, 1.4426950408889634073599));
  float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(6.93145751953125e-1));
  r = vfmsq_f64(r, n, vdupq_n_f64(1.42860682030941723212e-6));

  float64x2_t p = vdupq_n_f64(1.0 / 6227020800.0);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 479001600.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 39916800.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 3628800.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 362880.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 40320.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 5040.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 720.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 120.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 24.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 6.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(0.5), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0), p, r);

  int64x2_t bits = vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023));
  bits = vshlq_n_s64(bits, 52);
  const float64x2_t result = vmulq_f64(p, vreinterpretq_f64_s64(bits));
  return vbslq_f64(underflow, vdupq_n_f64(0.0), result);
}

}  // namespace

void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out) {
  assert(centers.size() == weights.size());
  assert(xs.size() == out.size());
  const std::size_t n = xs.size();
  const std::size_t m = centers.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(xs.data() + i);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const float64x2_t d = vsubq_f64(x, vdupq_n_f64(centers[j]));
      acc = vfmaq_f64(acc, vdupq_n_f64(weights[j]), exp_f64(vnegq_f64(vmulq_f64(d, d))));
    }
    vst1q_f64(out.data() + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = xs[i] - centers[j];
      acc += weights[j] * std::exp(-d * d);
    }
    out[i] = acc;
  }
}

double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b) {
  assert(numer.size() == sc.size());
  const std::size_t n = numer.size();
  const float64x2_t va = vdupq_n_f64(a);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vfmaq_n_f64(va, vld1q_f64(sc.data() + i), b);
    acc = vaddq_f64(acc, vdivq_f64(vld1q_f64(numer.data() + i), d));
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += numer[i] / (a + b * sc[i]);
  return total;
}

}  // namespace cvdv::kernels::neon
