#pragma once

// Experiment runner behind the command-line tool. Each cmd_* writes its data
// files and returns a process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cvdv {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum class ExitCode : int { Ok = 0, Config = 2, Validation = 3 };

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 42;
  std::string out;
  unsigned threads = 0;

  // Defaults depend on the experiment; beta defaults to alpha / 3.
  double alpha = 0.0;
  double beta = 0.0;

  // Fixed input qubit; Haar-random per trial when absent.
  std::optional<double> theta;
  std::optional<double> phi;
  std::int64_t trials = 1000;

  // fidelity-map
  double x_min = -6.0;
  double x_max = 6.0;
  std::int64_t grid = 101;
  std::int64_t quad_order = 64;

  // noise-sweep
  std::string figure = "all";
  double gamma_phi_hz = 1e4;
  double gamma_hz = 0.0;
  double l_att_km = 25.5;
  double c_mps = 2.998e8;
  double r_alpha = 0.03;
  double d0_max_km = 30.0;
  double decay_max = 1.0;
  std::int64_t sweep_points = 61;
  std::string trace_convention = "appendix_a";

  // cavity-sweep, rates in units of kappa
  double g = 10.0;
  double kappa = 1.0;
  double gamma0 = 0.1;
  double eta = 0.1;
  double delta_min = -20.0;
  double delta_max = 20.0;
  std::int64_t delta_points = 401;

  // validate
  std::int64_t cutoff = 60;

  // Reads every key of a flat JSON object; unknown keys and wrong types throw
  // ConfigError naming the field. Then fills kind-specific defaults and
  // checks ranges.
  static ExperimentConfig from_json(const std::string& kind, const nlohmann::json& flat);

  nlohmann::json to_json() const;

  // FNV-1a 64 of the canonical JSON form, as 16 hex digits.
  std::string hash() const;
};

// File contents merged with overrides; overrides win.
nlohmann::json load_flat_config(const std::string& path);
nlohmann::json merge_flat(nlohmann::json base, const nlohmann::json& overrides);

std::uint64_t fnv1a64(const std::string& bytes);

// The sidecar written next to every CSV: kind, config, hash, seed, version.
nlohmann::json artifact_meta(const ExperimentConfig& cfg);

int cmd_channel(const ExperimentConfig& cfg, std::ostream& log);
int cmd_teleport(const ExperimentConfig& cfg, std::ostream& log);
int cmd_fidelity_map(const ExperimentConfig& cfg, std::ostream& log);
int cmd_noise_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_cavity_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_validate(const ExperimentConfig& cfg, std::ostream& log);

int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

struct ValidationCheck {
  std::string name;
  double deviation;
  double tolerance;
  bool passed;
  std::string detail;
};

// The checks behind cmd_validate, without I/O.
std::vector<ValidationCheck> run_validation(const ExperimentConfig& cfg);

}  // namespace cvdv
