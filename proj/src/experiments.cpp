#include "cvdv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "cvdv/cavity.hpp"
#include "cvdv/errors.hpp"
#include "cvdv/fock_oracle.hpp"
#include "cvdv/metrics.hpp"
#include "cvdv/noise.hpp"
#include "cvdv/protocol.hpp"

namespace cvdv {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// handled exactly once; callers write into preallocated slots.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string stem_of(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  return stem_of(path) + suffix;
}

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("field 'out' cannot open " + path + " for writing");
  return out;
}

void write_json(const std::string& path, const ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(open_out(path)) {
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(fmt(v));
    row(cells);
  }

 private:
  std::ofstream out_;
};

ordered_json meta_of(const ExperimentConfig& cfg) { return ordered_json::parse(artifact_meta(cfg).dump()); }

TraceConvention convention_of(const ExperimentConfig& cfg) {
  return cfg.trace_convention == "standard" ? TraceConvention::Standard : TraceConvention::AppendixA;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
  return xs;
}

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

}  // namespace

int cmd_channel(const ExperimentConfig& cfg, std::ostream& log) {
  const HybridKet ch = build_channel(cfg.alpha);
  ordered_json j = meta_of(cfg);
  ordered_json terms = ordered_json::array();
  for (const auto& t : ch.terms())
    terms.push_back({{"coeff", complex_json(t.coeff)},
                     {"spin1", to_string(t.label.spins[0])},
                     {"mode4", complex_json(t.label.modes[0])}});
  const SpinDensity rho = reduced_spin_density(ch, kBobSpin);
  double purity = 0.0;
  for (auto& row : rho.m)
    for (auto v : row) purity += std::norm(v);
  j["alpha"] = cfg.alpha;
  j["terms"] = terms;
  j["norm"] = norm(ch);
  j["spin1_density"] = {{complex_json(rho.m[0][0]), complex_json(rho.m[0][1])},
                        {complex_json(rho.m[1][0]), complex_json(rho.m[1][1])}};
  j["spin1_purity"] = purity;
  try {
    j["fock_deviation"] = fock::cross_validate(ch, static_cast<int>(cfg.cutoff));
  } catch (const CutoffTooSmall& e) {
    j["fock_deviation"] = nullptr;
    log << "warning: " << e.what() << '\n';
  }
  write_json(cfg.out, j);
  log << "channel: alpha=" << cfg.alpha << " purity=" << fmt(purity) << " -> " << cfg.out << '\n';
  return int(ExitCode::Ok);
}

int cmd_teleport(const ExperimentConfig& cfg, std::ostream& log) {
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<TeleportationRecord> records(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    Rng rng(derive_stream_seed(cfg.seed, i));
    const BlochAngles angles = cfg.theta ? BlochAngles{*cfg.theta, *cfg.phi} : random_bloch(rng);
    const InputQubit q = InputQubit::from_bloch(angles, cfg.beta);
    try {
      records[i] = run_teleportation(cfg.alpha, q, rng);
    } catch (const FailedTrial& f) {
      records[i] = f.record();
    }
  });

  auto out = open_out(cfg.out);
  std::size_t heralded = 0, ok = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    const double theta = 2.0 * std::atan2(std::abs(r.input.b), std::abs(r.input.a));
    const double phi = std::abs(r.input.b) > 0.0 ? std::arg(r.input.b) - std::arg(r.input.a) : 0.0;
    ordered_json rec = {{"trial", i},
                        {"seed", r.seed},
                        {"theta", theta},
                        {"phi", phi},
                        {"spin2", to_string(r.outcome.spin2)},
                        {"spin3", to_string(r.outcome.spin3)},
                        {"x8", r.outcome.x8},
                        {"x9", r.outcome.x9},
                        {"class8", to_string(r.outcome.class8)},
                        {"class9", to_string(r.outcome.class9)},
                        {"correction", r.correction ? ordered_json(to_string(*r.correction)) : ordered_json(nullptr)},
                        {"fidelity", r.fidelity},
                        {"heralded", r.heralded}};
    out << rec.dump() << '\n';
    if (r.heralded) {
      ++heralded;
    } else {
      ++ok;
      sum += r.fidelity;
      sum_sq += r.fidelity * r.fidelity;
    }
  }
  out.close();

  const double mean = ok ? sum / double(ok) : 0.0;
  const double var = ok > 1 ? std::max(0.0, (sum_sq - double(ok) * mean * mean) / double(ok - 1)) : 0.0;
  ordered_json summary = meta_of(cfg);
  summary["trials"] = n;
  summary["heralded"] = heralded;
  summary["herald_rate"] = double(heralded) / double(n);
  summary["succeeded"] = ok;
  summary["mean_fidelity"] = mean;
  summary["stderr_fidelity"] = ok > 1 ? std::sqrt(var / double(ok)) : 0.0;
  summary["alpha"] = cfg.alpha;
  summary["beta"] = cfg.beta;
  summary["exp_minus_beta_sq"] = std::exp(-cfg.beta * cfg.beta);
  write_json(with_suffix(cfg.out, ".summary.json"), summary);
  log << "teleport: " << n << " trials, herald rate " << fmt(double(heralded) / double(n)) << ", mean fidelity "
      << fmt(mean) << " -> " << cfg.out << '\n';
  return int(ExitCode::Ok);
}

int cmd_fidelity_map(const ExperimentConfig& cfg, std::ostream& log) {
  const GridAxis axis{cfg.x_min, cfg.x_max, static_cast<std::size_t>(cfg.grid)};
  const FidelityMap map = fidelity_map(cfg.alpha, cfg.beta, axis, axis, static_cast<int>(cfg.quad_order), cfg.threads);
  CsvWriter csv(cfg.out, {"x8", "x9", "f_bar", "f_bar_o"});
  std::size_t below_f = 0, below_fo = 0, below_both = 0;
  const double bench = classical_benchmark();
  for (std::size_t i = 0; i < axis.points; ++i)
    for (std::size_t k = 0; k < axis.points; ++k) {
      const std::size_t idx = map.index(i, k);
      csv.row({axis.at(i), axis.at(k), map.f_bar[idx], map.f_bar_o[idx]});
      below_f += map.f_bar[idx] < bench;
      below_fo += map.f_bar_o[idx] < bench;
      below_both += std::max(map.f_bar[idx], map.f_bar_o[idx]) < bench;
    }
  ordered_json meta = meta_of(cfg);
  meta["grid"] = {{"x_min", axis.lo}, {"x_max", axis.hi}, {"points", axis.points}};
  meta["cells"] = axis.points * axis.points;
  meta["below_benchmark"] = {{"f_bar", below_f}, {"f_bar_o", below_fo}, {"both", below_both}};
  write_json(with_suffix(cfg.out, ".meta.json"), meta);
  log << "fidelity-map: " << axis.points << "x" << axis.points << " cells, " << below_both
      << " below 2/3 in both maps -> " << cfg.out << '\n';
  return int(ExitCode::Ok);
}

namespace {

void sweep_4a(const ExperimentConfig& cfg, const std::string& path) {
  if (cfg.r_alpha > cfg.alpha)
    throw ConfigError("field 'r_alpha' must not exceed alpha, since r = r_alpha / alpha lies in [0, 1]");
  const double r = cfg.alpha > 0.0 ? cfg.r_alpha / cfg.alpha : 0.0;
  const auto decays = linspace(0.0, cfg.decay_max, static_cast<std::size_t>(cfg.sweep_points));
  CsvWriter csv(path, {"gamma_phi_tau", "gamma_tau", "r_alpha", "f_bar", "benchmark"});
  for (double gpt : decays)
    for (double gt : decays) {
      const NoiseParams p = NoiseParams::from_decays(gpt, gt, r);
      csv.row({gpt, gt, cfg.r_alpha, average_fidelity_noisy(p, cfg.alpha, convention_of(cfg)), classical_benchmark()});
    }
}

void sweep_4b(const ExperimentConfig& cfg, const std::string& path) {
  const auto rs = linspace(0.0, 1.0, static_cast<std::size_t>(cfg.sweep_points));
  CsvWriter csv(path, {"decay", "r", "alpha", "f_bar", "benchmark"});
  for (double decay : {0.1, 0.3, 0.5})
    for (double r : rs) {
      const NoiseParams p = NoiseParams::from_decays(decay, decay, r);
      csv.row({decay, r, cfg.alpha, average_fidelity_noisy(p, cfg.alpha, convention_of(cfg)), classical_benchmark()});
    }
}

void sweep_4c(const ExperimentConfig& cfg, const std::string& path) {
  const auto km = linspace(0.0, cfg.d0_max_km, static_cast<std::size_t>(cfg.sweep_points));
  std::vector<double> meters(km.size());
  std::transform(km.begin(), km.end(), meters.begin(), [](double d) { return d * 1e3; });
  CsvWriter csv(path, {"alpha", "d0_km", "tau_s", "r_sq", "f_bar", "benchmark"});
  for (double alpha : {1.0, 2.0, 3.0})
    for (const auto& row : fidelity_vs_distance(alpha, cfg.gamma_phi_hz, cfg.gamma_hz, cfg.l_att_km * 1e3, cfg.c_mps,
                                                meters, convention_of(cfg)))
      csv.row({alpha, row.d0_km, row.tau_s, row.r_sq, row.f_bar, row.benchmark});
}

}  // namespace

int cmd_noise_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const std::vector<std::pair<std::string, void (*)(const ExperimentConfig&, const std::string&)>> figures = {
      {"4a", sweep_4a}, {"4b", sweep_4b}, {"4c", sweep_4c}};
  for (const auto& [name, fn] : figures) {
    if (cfg.figure != "all" && cfg.figure != name) continue;
    const std::string path = cfg.figure == "all" ? stem_of(cfg.out) + "_" + name + ".csv" : cfg.out;
    fn(cfg, path);
    ordered_json meta = meta_of(cfg);
    meta["figure"] = name;
    write_json(with_suffix(path, ".meta.json"), meta);
    log << "noise-sweep " << name << " -> " << path << '\n';
  }
  return int(ExitCode::Ok);
}

int cmd_cavity_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  CavityParams p{cfg.g, cfg.kappa, cfg.gamma0, cfg.eta, 0.0};
  const auto deltas = linspace(cfg.delta_min, cfg.delta_max, static_cast<std::size_t>(cfg.delta_points));
  const auto rows = reflection_sweep(p, deltas);
  CsvWriter csv(cfg.out, {"delta_omega", "re_r", "im_r"});
  for (const auto& r : rows) csv.row({r.delta_omega, r.re_r, r.im_r});

  double worst = std::numeric_limits<double>::infinity();
  for (double d : deltas) {
    p.delta_omega = d;
    worst = std::min(worst, passivity_margin(p));
  }
  if (worst < 0.0) log << "warning: |r| > 1 somewhere in the sweep (passivity margin " << fmt(worst) << ")\n";
  p.delta_omega = 0.0;
  ordered_json meta = meta_of(cfg);
  meta["resonance_regime"] = std::string(to_string(regime_classify(p, 1e-3)));
  meta["min_passivity_margin"] = worst;
  write_json(with_suffix(cfg.out, ".meta.json"), meta);
  log << "cavity-sweep: " << rows.size() << " detunings -> " << cfg.out << '\n';
  return int(ExitCode::Ok);
}

namespace {

double max_abs_diff(const SpinDensity& a, const SpinDensity& b) {
  double d = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) d = std::max(d, std::abs(a.m[i][k] - b.m[i][k]));
  return d;
}

// Deviation between an analytic stage and the Fock-evolved one: the analytic
// ket embedded on the Fock basis, then compared vector to vector.
double stage_distance(const HybridKet& analytic, const fock::FockVector& numeric, int cutoff) {
  const fock::FockVector e = fock::embed(analytic, cutoff);
  if (!(e.registry == numeric.registry)) throw RegistryMismatch("Fock stage layout differs from the analytic one");
  return fock::distance(e, numeric);
}

}  // namespace

std::vector<ValidationCheck> run_validation(const ExperimentConfig& cfg) {
  std::vector<ValidationCheck> checks;
  auto check = [&](const std::string& name, double tol, const std::function<double()>& fn) {
    try {
      const double dev = fn();
      checks.push_back({name, dev, tol, dev <= tol, ""});
    } catch (const Error& e) {
      checks.push_back({name, std::numeric_limits<double>::infinity(), tol, false, e.what()});
    }
  };

  const int cutoff = static_cast<int>(cfg.cutoff);
  const InputQubit q = InputQubit::from_bloch({1.1, 0.7}, cfg.beta);

  // Fock oracle: every protocol stage, evolved both ways.
  std::optional<fock::FockStages> fs;
  std::optional<ProtocolStages> as;
  auto fock_check = [&](const std::string& name, auto pick_analytic, auto pick_fock) {
    check(name, 1e-8, [&] {
      if (!as) as = evolve_stages(build_channel(cfg.alpha), prepare_input(q));
      if (!fs) fs = fock::fock_stages(cfg.alpha, q, cutoff);
      return std::max(stage_distance(pick_analytic(*as), pick_fock(*fs), cutoff),
                      fock::cross_validate(pick_analytic(*as), cutoff));
    });
  };
  fock_check("fock.channel", [](const ProtocolStages& s) -> const HybridKet& { return s.channel; },
             [](const fock::FockStages& s) -> const fock::FockVector& { return s.channel; });
  fock_check("fock.after_split", [](const ProtocolStages& s) -> const HybridKet& { return s.after_split; },
             [](const fock::FockStages& s) -> const fock::FockVector& { return s.after_split; });
  fock_check("fock.after_cp", [](const ProtocolStages& s) -> const HybridKet& { return s.after_cp; },
             [](const fock::FockStages& s) -> const fock::FockVector& { return s.after_cp; });
  fock_check("fock.final", [](const ProtocolStages& s) -> const HybridKet& { return s.final_state; },
             [](const fock::FockStages& s) -> const fock::FockVector& { return s.final_state; });

  check("fock.homodyne_density", 1e-8, [&] {
    if (!as) as = evolve_stages(build_channel(cfg.alpha), prepare_input(q));
    if (!fs) fs = fock::fock_stages(cfg.alpha, q, cutoff);
    const HomodyneDensity h = homodyne_density(as->final_state, kDetectModeA);
    const auto xs = linspace(-h.reach() - 4.0, h.reach() + 4.0, 161);
    const auto numeric = fock::position_density(fs->final_state, kDetectModeA, xs);
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) d = std::max(d, std::abs(numeric[i] - h(xs[i])));
    return d;
  });

  check("homodyne.normalization", 1e-8, [&] {
    const HybridKet fin = evolve_to_final(build_channel(cfg.alpha), prepare_input(q));
    const HomodyneDensity h = homodyne_density(fin, kDetectModeB);
    const double lim = h.reach() + kHomodyneMargin;
    const auto xs = linspace(-lim, lim, 4001);
    std::vector<double> ys(xs.size());
    h.evaluate(xs, ys);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) s += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    return std::abs(s - 1.0);
  });

  // Bloch quadrature: doubling the order must not move the average.
  for (double sigma : {0.0, 0.1, 0.5, 2.0, 10.0, 1e3}) {
    check("quadrature.refine.sigma=" + short_fmt(sigma), 1e-10, [&] {
      return std::abs(average_fidelity_vs_ratio(sigma, static_cast<int>(cfg.quad_order)) -
                      average_fidelity_vs_ratio(sigma, 2 * static_cast<int>(cfg.quad_order)));
    });
  }

  // Teleported density: mixture pipeline against the closed form.
  const NoiseParams noisy = NoiseParams::from_distance(1e4, 2e3, 25.5e3, 3e3, kDefaultLightSpeed);
  check("noise.density.ideal_route", 1e-10, [&] {
    const auto mix = noisy_pipeline(cfg.alpha, q, noisy);
    return max_abs_diff(condition_and_trace(mix, cfg.alpha, cfg.beta, noisy, ConditionRoute::Ideal),
                        teleported_density(q.target(), cfg.alpha, noisy));
  });
  check("noise.density.projective_route", 1e-10, [&] {
    // Overlaps between the cats are kept here and the residue goes as
    // e^{-2 beta^2}, so use well separated ones.
    const double a = 12.0, b = 4.0;
    const InputQubit qq = InputQubit::from_bloch({1.1, 0.7}, b);
    const auto mix = noisy_pipeline(a, qq, noisy);
    return max_abs_diff(condition_and_trace(mix, a, b, noisy, ConditionRoute::Projective),
                        teleported_density(qq.target(), a, noisy));
  });
  check("noise.density.trace", 1e-14, [&] {
    const SpinDensity rho = teleported_density(q.target(), cfg.alpha, noisy);
    return std::abs(rho.trace() - Complex(1.0, 0.0));
  });

  // Average fidelity: closed form against the sphere integral of the density.
  for (const auto& [gpt, gt, r] : std::vector<std::tuple<double, double, double>>{
           {0.0, 0.0, 0.0}, {0.1, 0.1, 0.03}, {0.3, 0.05, 0.4}, {0.02, 0.5, 0.9}}) {
    check("noise.average.gpt=" + short_fmt(gpt) + ",gt=" + short_fmt(gt) + ",r=" + short_fmt(r), 1e-10, [&] {
      const NoiseParams p = NoiseParams::from_decays(gpt, gt, r);
      return std::abs(average_fidelity_noisy(p, cfg.alpha) - average_fidelity_noisy_quadrature(p, cfg.alpha));
    });
  }
  return checks;
}

int cmd_validate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto checks = run_validation(cfg);
  bool all = true;
  double worst = 0.0;
  ordered_json report = meta_of(cfg);
  ordered_json list = ordered_json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    if (std::isfinite(c.deviation)) worst = std::max(worst, c.deviation);
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-44s dev=%.3e tol=%.1e", c.passed ? "ok" : "FAIL", c.name.c_str(),
                  c.deviation, c.tolerance);
    log << line << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
    list.push_back({{"name", c.name},
                    {"deviation", std::isfinite(c.deviation) ? ordered_json(c.deviation) : ordered_json(nullptr)},
                    {"tolerance", c.tolerance},
                    {"passed", c.passed},
                    {"detail", c.detail}});
  }
  log << "max deviation " << fmt(worst) << "; " << (all ? "all checks passed" : "validation failed") << '\n';
  report["checks"] = list;
  report["max_deviation"] = worst;
  report["passed"] = all;
  if (!cfg.out.empty()) write_json(cfg.out, report);
  return int(all ? ExitCode::Ok : ExitCode::Validation);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.kind == "channel") return cmd_channel(cfg, log);
  if (cfg.kind == "teleport") return cmd_teleport(cfg, log);
  if (cfg.kind == "fidelity-map") return cmd_fidelity_map(cfg, log);
  if (cfg.kind == "noise-sweep") return cmd_noise_sweep(cfg, log);
  if (cfg.kind == "cavity-sweep") return cmd_cavity_sweep(cfg, log);
  if (cfg.kind == "validate") return cmd_validate(cfg, log);
  throw ConfigError("unknown experiment '" + cfg.kind + "'");
}

}  // namespace cvdv
