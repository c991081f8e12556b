// Compiled with -mavx2 -mfma; only reached when the CPU reports both.

#include <immintrin.h>

#include <cassert>
#include <cmath>

#include "cvdv/kernels.hpp"

namespace cvdv::kernels::avx2 {
namespace {

// exp(x) for x <= 709. Cody-Waite reduction to |r| <= ln2/2 followed by a
// degree-13 Taylor polynomial; inputs below -708.39 (where the result would
// be subnormal) return 0.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.39);
  const __m256d hi = _mm256_set1_pd(709.78);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);

  const __m256d result = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(underflow, result);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out) {
  assert(centers.size() == weights.size());
  assert(xs.size() == out.size());
  const std::size_t n = xs.size();
  const std::size_t m = centers.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs.data() + i);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < m; ++j) {
      const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(centers[j]));
      const __m256d arg = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(d, d));
      acc = _mm256_fmadd_pd(_mm256_set1_pd(weights[j]), exp_pd(arg), acc);
    }
    _mm256_storeu_pd(out.data() + i, acc);
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
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_fmadd_pd(vb, _mm256_loadu_pd(sc.data() + i), va);
    const __m256d d1 = _mm256_fmadd_pd(vb, _mm256_loadu_pd(sc.data() + i + 4), va);
    acc0 = _mm256_add_pd(acc0, _mm256_div_pd(_mm256_loadu_pd(numer.data() + i), d0));
    acc1 = _mm256_add_pd(acc1, _mm256_div_pd(_mm256_loadu_pd(numer.data() + i + 4), d1));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += numer[i] / (a + b * sc[i]);
  return acc;
}

}  // namespace cvdv::kernels::avx2
