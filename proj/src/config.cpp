#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "cvdv/errors.hpp"
#include "cvdv/experiments.hpp"

namespace cvdv {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

json load_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + " must hold a flat JSON object");
  for (auto& [key, value] : j.items())
    if (value.is_object() || value.is_array()) throw ConfigError("field '" + key + "' must be a scalar");
  return j;
}

json merge_flat(json base, const json& overrides) {
  if (base.is_null()) base = json::object();
  for (auto& [key, value] : overrides.items()) base[key] = value;
  return base;
}

namespace {

const std::vector<std::string> kKinds = {"channel", "teleport", "fidelity-map", "noise-sweep", "cavity-sweep", "validate"};

double as_real(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("field '" + key + "' must be finite");
  return d;
}

std::int64_t as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) throw ConfigError("field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("field '" + key + "' " + what);
}

std::string default_out(const std::string& kind) {
  if (kind == "channel") return "channel.json";
  if (kind == "teleport") return "teleport.jsonl";
  if (kind == "fidelity-map") return "fidelity_map.csv";
  if (kind == "noise-sweep") return "noise_sweep.csv";
  if (kind == "cavity-sweep") return "cavity_sweep.csv";
  return "";
}

double default_alpha(const std::string& kind) {
  if (kind == "teleport") return 4.5;
  if (kind == "fidelity-map") return 3.0;
  if (kind == "noise-sweep") return 1.0;
  return 1.5;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& kind, const json& flat) {
  if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end()) throw ConfigError("unknown experiment '" + kind + "'");
  ExperimentConfig c;
  c.kind = kind;
  bool have_alpha = false, have_beta = false;

  using Setter = std::function<void(const std::string&, const json&)>;
  auto real = [](double& field) -> Setter { return [&field](const std::string& k, const json& v) { field = as_real(k, v); }; };
  auto integer = [](std::int64_t& field) -> Setter {
    return [&field](const std::string& k, const json& v) { field = as_int(k, v); };
  };
  auto text = [](std::string& field) -> Setter {
    return [&field](const std::string& k, const json& v) { field = as_string(k, v); };
  };

  const std::map<std::string, Setter> setters = {
      {"seed",
       [&](const std::string& k, const json& v) {
         require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0), k,
                 "must be a nonnegative integer");
         c.seed = v.get<std::uint64_t>();
       }},
      {"out", text(c.out)},
      {"threads",
       [&](const std::string& k, const json& v) {
         const auto n = as_int(k, v);
         require(n >= 0 && n <= 1024, k, "must lie in [0, 1024]");
         c.threads = static_cast<unsigned>(n);
       }},
      {"alpha", [&](const std::string& k, const json& v) { c.alpha = as_real(k, v); have_alpha = true; }},
      {"beta", [&](const std::string& k, const json& v) { c.beta = as_real(k, v); have_beta = true; }},
      {"theta", [&](const std::string& k, const json& v) { c.theta = as_real(k, v); }},
      {"phi", [&](const std::string& k, const json& v) { c.phi = as_real(k, v); }},
      {"trials", integer(c.trials)},
      {"x_min", real(c.x_min)},
      {"x_max", real(c.x_max)},
      {"grid", integer(c.grid)},
      {"quad_order", integer(c.quad_order)},
      {"figure", text(c.figure)},
      {"gamma_phi_hz", real(c.gamma_phi_hz)},
      {"gamma_hz", real(c.gamma_hz)},
      {"l_att_km", real(c.l_att_km)},
      {"c_mps", real(c.c_mps)},
      {"r_alpha", real(c.r_alpha)},
      {"d0_max_km", real(c.d0_max_km)},
      {"decay_max", real(c.decay_max)},
      {"sweep_points", integer(c.sweep_points)},
      {"trace_convention", text(c.trace_convention)},
      {"g", real(c.g)},
      {"kappa", real(c.kappa)},
      {"gamma0", real(c.gamma0)},
      {"eta", real(c.eta)},
      {"delta_min", real(c.delta_min)},
      {"delta_max", real(c.delta_max)},
      {"delta_points", integer(c.delta_points)},
      {"cutoff", integer(c.cutoff)},
  };

  for (auto& [key, value] : flat.items()) {
    if (key == "kind") {
      require(value == kind, key, "does not match the subcommand");
      continue;
    }
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown field '" + key + "'");
    if (value.is_null()) continue;
    it->second(key, value);
  }

  if (!have_alpha) c.alpha = default_alpha(kind);
  if (!have_beta) c.beta = c.alpha / 3.0;
  if (c.out.empty()) c.out = default_out(kind);

  require(c.alpha >= 0.0, "alpha", "must be nonnegative");
  require(c.beta >= 0.0, "beta", "must be nonnegative");
  if (kind == "teleport") {
    require(c.alpha > c.beta, "alpha", "must exceed beta for peak classification");
    require(c.trials >= 1, "trials", "must be at least 1");
    require(c.theta.has_value() == c.phi.has_value(), "theta", "and phi must be given together");
  }
  if (kind == "fidelity-map") {
    require(c.alpha > c.beta && c.beta > 0.0, "alpha", "must exceed beta > 0");
    require(c.grid >= 1 && c.grid <= 4001, "grid", "must lie in [1, 4001]");
    require(c.x_max >= c.x_min, "x_max", "must be at least x_min");
  }
  require(c.quad_order >= 4 && c.quad_order % 4 == 0 && c.quad_order <= 1024, "quad_order",
          "must be a multiple of 4 in [4, 1024]");
  require(c.figure == "4a" || c.figure == "4b" || c.figure == "4c" || c.figure == "all", "figure",
          "must be one of 4a, 4b, 4c, all");
  require(c.trace_convention == "appendix_a" || c.trace_convention == "standard", "trace_convention",
          "must be appendix_a or standard");
  require(c.gamma_phi_hz >= 0.0, "gamma_phi_hz", "must be nonnegative");
  require(c.gamma_hz >= 0.0, "gamma_hz", "must be nonnegative");
  require(c.l_att_km > 0.0, "l_att_km", "must be positive");
  require(c.c_mps > 0.0, "c_mps", "must be positive");
  require(c.r_alpha >= 0.0, "r_alpha", "must be nonnegative");
  require(c.d0_max_km >= 0.0, "d0_max_km", "must be nonnegative");
  require(c.decay_max >= 0.0, "decay_max", "must be nonnegative");
  require(c.sweep_points >= 2 && c.sweep_points <= 100000, "sweep_points", "must lie in [2, 100000]");
  require(c.kappa > 0.0, "kappa", "must be positive");
  require(c.g >= 0.0 && c.gamma0 >= 0.0 && c.eta >= 0.0, "g", "gamma0 and eta must be nonnegative");
  require(c.delta_points >= 1 && c.delta_points <= 1000000, "delta_points", "must lie in [1, 1000000]");
  require(c.delta_max >= c.delta_min, "delta_max", "must be at least delta_min");
  require(c.cutoff >= 1 && c.cutoff <= 200, "cutoff", "must lie in [1, 200]");
  return c;
}

json ExperimentConfig::to_json() const {
  json j = {
      {"kind", kind},
      {"seed", seed},
      {"out", out},
      {"threads", threads},
      {"alpha", alpha},
      {"beta", beta},
      {"theta", theta ? json(*theta) : json(nullptr)},
      {"phi", phi ? json(*phi) : json(nullptr)},
      {"trials", trials},
      {"x_min", x_min},
      {"x_max", x_max},
      {"grid", grid},
      {"quad_order", quad_order},
      {"figure", figure},
      {"gamma_phi_hz", gamma_phi_hz},
      {"gamma_hz", gamma_hz},
      {"l_att_km", l_att_km},
      {"c_mps", c_mps},
      {"r_alpha", r_alpha},
      {"d0_max_km", d0_max_km},
      {"decay_max", decay_max},
      {"sweep_points", sweep_points},
      {"trace_convention", trace_convention},
      {"g", g},
      {"kappa", kappa},
      {"gamma0", gamma0},
      {"eta", eta},
      {"delta_min", delta_min},
      {"delta_max", delta_max},
      {"delta_points", delta_points},
      {"cutoff", cutoff},
  };
  return j;
}

std::string ExperimentConfig::hash() const {
  // Output path and thread count do not change the numbers.
  json j = to_json();
  j.erase("out");
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

json artifact_meta(const ExperimentConfig& cfg) {
  return {{"kind", cfg.kind},
          {"artifact_version", kArtifactVersion},
          {"config_hash", cfg.hash()},
          {"seed", cfg.seed},
          {"config", cfg.to_json()}};
}

}  // namespace cvdv
