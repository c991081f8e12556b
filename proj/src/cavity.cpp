#include "cvdv/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include "cvdv/errors.hpp"

namespace cvdv {

namespace {

void check(const CavityParams& p) {
  if (!(p.kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (p.g < 0.0 || p.gamma0 < 0.0 || p.eta < 0.0) throw std::invalid_argument("g, gamma0 and eta must be nonnegative");
}

struct Fraction {
  Complex num;
  Complex den;
};

Fraction parts(const CavityParams& p) {
  const double d = p.delta_omega;
  const double base = 4.0 * (p.g * p.g - d * d);
  return {Complex(base + p.gamma0 * (p.eta - p.kappa), 2.0 * d * (p.gamma0 + p.eta - p.kappa)),
          Complex(base + p.gamma0 * (p.eta + p.kappa), 2.0 * d * (p.gamma0 + p.eta + p.kappa))};
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NoPhaseShift: return "no_phase_shift";
    case Regime::PiShift: return "pi_shift";
    case Regime::Intermediate: return "intermediate";
  }
  return "?";
}

Complex reflection_coefficient(const CavityParams& p) {
  check(p);
  const auto [num, den] = parts(p);
  if (std::abs(den) <= 1e-14) throw SingularDenominator("reflection denominator vanishes");
  return num / den;
}

Regime regime_classify(const CavityParams& p, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must lie in (0, 1)");
  const Complex r = reflection_coefficient(p);
  if (std::abs(r - 1.0) < tol) return Regime::NoPhaseShift;
  if (std::abs(r + 1.0) < tol) return Regime::PiShift;
  return Regime::Intermediate;
}

double passivity_margin(const CavityParams& p) {
  check(p);
  const auto [num, den] = parts(p);
  return std::norm(den) - std::norm(num);
}

std::vector<ReflectionRow> reflection_sweep(const CavityParams& p, const std::vector<double>& deltas) {
  std::vector<ReflectionRow> rows;
  rows.reserve(deltas.size());
  CavityParams q = p;
  for (double d : deltas) {
    q.delta_omega = d;
    const Complex r = reflection_coefficient(q);
    rows.push_back({d, r.real(), r.imag()});
  }
  return rows;
}

}  // namespace cvdv
