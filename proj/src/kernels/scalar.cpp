#include <cassert>
#include <cmath>

#include "cvdv/kernels.hpp"

namespace cvdv::kernels::scalar {

void gaussian_sum(std::span<const double> xs, std::span<const double> centers,
                  std::span<const double> weights, std::span<double> out) {
  assert(centers.size() == weights.size());
  assert(xs.size() == out.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double d = xs[i] - centers[j];
      acc += weights[j] * std::exp(-d * d);
    }
    out[i] = acc;
  }
}

double rational_sum(std::span<const double> numer, std::span<const double> sc, double a, double b) {
  assert(numer.size() == sc.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < numer.size(); ++i) acc += numer[i] / (a + b * sc[i]);
  return acc;
}

}  // namespace cvdv::kernels::scalar
