#include "cvdv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <thread>

#include "cvdv/errors.hpp"
#include "cvdv/kernels.hpp"

namespace cvdv {

double fidelity(const SpinVector& final_state, const SpinVector& target) {
  if (std::abs(final_state.norm_sq() - 1.0) > 1e-9) throw NotNormalized("final spin state");
  if (std::abs(target.norm_sq() - 1.0) > 1e-9) throw NotNormalized("target spin state");
  const Complex overlap = std::conj(target.up) * final_state.up + std::conj(target.down) * final_state.down;
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

double fidelity(const SpinDensity& final_state, const SpinVector& target) {
  if (std::abs(final_state.trace() - 1.0) > 1e-9) throw NotNormalized("final spin density");
  if (std::abs(target.norm_sq() - 1.0) > 1e-9) throw NotNormalized("target spin state");
  const Complex c[2] = {target.up, target.down};
  Complex acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) acc += std::conj(c[i]) * final_state.m[i][j] * c[j];
  return std::clamp(acc.real(), 0.0, 1.0);
}

GaussLegendre gauss_legendre(int n) {
  if (n <= 0) throw std::invalid_argument("Gauss-Legendre order must be positive");
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(n));
  gl.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[static_cast<std::size_t>(i)] = -x;
    gl.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    gl.weights[static_cast<std::size_t>(i)] = w;
    gl.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return gl;
}

namespace {

struct BlochRule {
  std::vector<double> numer;
  std::vector<double> sc;
};

// Nodes on [lo, hi] split into `panels` equal pieces with `per` nodes each.
void panel_nodes(double lo, double hi, int panels, int per, std::vector<double>& x, std::vector<double>& w) {
  const GaussLegendre gl = gauss_legendre(per);
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    for (int k = 0; k < per; ++k) {
      x.push_back(a + 0.5 * width * (gl.nodes[static_cast<std::size_t>(k)] + 1.0));
      w.push_back(0.5 * width * gl.weights[static_cast<std::size_t>(k)]);
    }
  }
}

std::shared_ptr<const BlochRule> bloch_rule(int order) {
  static std::shared_mutex mutex;
  static std::map<int, std::shared_ptr<const BlochRule>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
  }
  std::vector<double> th, wth, ph, wph;
  panel_nodes(0.0, std::numbers::pi, 2, order / 2, th, wth);
  panel_nodes(0.0, 2.0 * std::numbers::pi, 4, order / 4, ph, wph);
  auto rule = std::make_shared<BlochRule>();
  rule->numer.reserve(th.size() * ph.size());
  rule->sc.reserve(th.size() * ph.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double s = std::sin(th[i]);
    for (std::size_t j = 0; j < ph.size(); ++j) {
      const double c = std::cos(ph[j]);
      rule->numer.push_back(wth[i] * wph[j] * (s - s * s * s * c * c));
      rule->sc.push_back(s * c);
    }
  }
  std::unique_lock lock(mutex);
  return cache.try_emplace(order, std::move(rule)).first->second;
}

double log_cat(double x, double peak) {
  const double a = -0.5 * (x - peak) * (x - peak);
  const double b = -0.5 * (x + peak) * (x + peak);
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

double average_fidelity_vs_ratio(double sigma, int order) {
  if (std::isnan(sigma) || sigma < 0.0) throw std::invalid_argument("ratio must be nonnegative");
  if (order <= 0 || order % 4 != 0) throw std::invalid_argument("quadrature order must be a positive multiple of 4");
  if (std::isinf(sigma)) return 1.0;
  const auto rule = bloch_rule(order);
  const double s = std::min(sigma, 1e150);
  const double loss = kernels::rational_sum(rule->numer, rule->sc, 1.0 + s * s, 2.0 * s);
  return 1.0 - loss / (4.0 * std::numbers::pi);
}

LogAmplitudes log_homodyne_amplitudes(double alpha, double beta, double x8, double x9) {
  const double u = alpha + beta, v = alpha - beta;
  return {log_cat(x8, u) + log_cat(x9, v), log_cat(x8, v) + log_cat(x9, u)};
}

double GridAxis::at(std::size_t i) const {
  if (points <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

FidelityMap fidelity_map(double alpha, double beta, const GridAxis& x8, const GridAxis& x9, int order,
                         unsigned threads) {
  if (!(alpha > beta && beta > 0.0))
    throw DegenerateGeometry("fidelity map needs alpha > beta > 0");
  if (x8.points == 0 || x9.points == 0) throw std::invalid_argument("empty fidelity-map grid");
  bloch_rule(order);

  FidelityMap map{alpha, beta, x8, x9, {}, {}};
  const std::size_t cells = x8.points * x9.points;
  map.f_bar.resize(cells);
  map.f_bar_o.resize(cells);

  auto ratio = [](double log_ratio) { return std::exp(std::clamp(log_ratio, -700.0, 700.0)); };
  auto rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < x9.points; ++j) {
        const auto lm = log_homodyne_amplitudes(alpha, beta, x8.at(i), x9.at(j));
        const std::size_t k = map.index(i, j);
        map.f_bar[k] = average_fidelity_vs_ratio(ratio(lm.log_m1 - lm.log_m2), order);
        map.f_bar_o[k] = average_fidelity_vs_ratio(ratio(lm.log_m2 - lm.log_m1), order);
      }
  };

  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, x8.points));
  if (n <= 1) {
    rows(0, x8.points);
    return map;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (x8.points + n - 1) / n;
  for (std::size_t b = 0; b < x8.points; b += chunk) pool.emplace_back(rows, b, std::min(x8.points, b + chunk));
  for (auto& t : pool) t.join();
  return map;
}

std::vector<ProfilePoint> failure_profile(double beta, const std::vector<double>& xs) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double b2 = beta * beta;
  std::vector<ProfilePoint> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const double far = std::exp(-b2) * (std::exp(-(x - 3 * beta) * (x - 3 * beta)) + std::exp(-(x + 3 * beta) * (x + 3 * beta)));
    const double near = std::exp(-9 * b2) * (std::exp(-(x - beta) * (x - beta)) + std::exp(-(x + beta) * (x + beta)));
    out.push_back({x, far + near});
  }
  return out;
}

std::vector<ProfilePoint> failure_profile_normalized(double beta, const std::vector<double>& xs) {
  auto out = failure_profile(beta, xs);
  const double b2 = beta * beta;
  const double total = 2.0 * std::sqrt(std::numbers::pi) * (std::exp(-b2) + std::exp(-9.0 * b2));
  for (auto& p : out) p.weight /= total;
  return out;
}

}  // namespace cvdv
