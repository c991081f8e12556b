// Command-line front end: one subcommand per experiment. Settings come from
// an optional flat JSON file; flags override it.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvdv/errors.hpp"
#include "cvdv/experiments.hpp"

namespace {

enum class Kind { Real, Int, Text };

struct Key {
  std::string name;
  Kind kind;
  std::string help;
};

const std::vector<Key> kCommon = {
    {"seed", Kind::Int, "root seed"},
    {"out", Kind::Text, "output path"},
    {"threads", Kind::Int, "worker threads, 0 = all cores"},
};

const std::map<std::string, std::vector<Key>> kPerKind = {
    {"channel", {{"alpha", Kind::Real, "probe amplitude"}, {"cutoff", Kind::Int, "Fock cutoff for the check"}}},
    {"teleport",
     {{"alpha", Kind::Real, "channel amplitude"},
      {"beta", Kind::Real, "input amplitude (default alpha/3)"},
      {"theta", Kind::Real, "fixed input polar angle"},
      {"phi", Kind::Real, "fixed input azimuth"},
      {"trials", Kind::Int, "number of trials"}}},
    {"fidelity-map",
     {{"alpha", Kind::Real, "channel amplitude"},
      {"beta", Kind::Real, "input amplitude (default alpha/3)"},
      {"x_min", Kind::Real, "grid lower edge"},
      {"x_max", Kind::Real, "grid upper edge"},
      {"grid", Kind::Int, "points per axis"},
      {"quad_order", Kind::Int, "Bloch quadrature order, multiple of 4"}}},
    {"noise-sweep",
     {{"figure", Kind::Text, "4a, 4b, 4c or all"},
      {"alpha", Kind::Real, "channel amplitude for 4a/4b"},
      {"gamma_phi_hz", Kind::Real, "dephasing rate"},
      {"gamma_hz", Kind::Real, "relaxation rate"},
      {"l_att_km", Kind::Real, "fiber attenuation length"},
      {"c_mps", Kind::Real, "signal speed in the fiber"},
      {"r_alpha", Kind::Real, "loss amplitude times alpha for 4a"},
      {"d0_max_km", Kind::Real, "largest distance for 4c"},
      {"decay_max", Kind::Real, "largest decay for 4a"},
      {"sweep_points", Kind::Int, "points per swept axis"},
      {"trace_convention", Kind::Text, "appendix_a or standard"}}},
    {"cavity-sweep",
     {{"g", Kind::Real, "spin-cavity coupling"},
      {"kappa", Kind::Real, "cavity decay"},
      {"gamma0", Kind::Real, "spin decay"},
      {"eta", Kind::Real, "intracavity loss"},
      {"delta_min", Kind::Real, "lowest detuning"},
      {"delta_max", Kind::Real, "highest detuning"},
      {"delta_points", Kind::Int, "detuning samples"}}},
    {"validate",
     {{"alpha", Kind::Real, "amplitude for the Fock checks"},
      {"beta", Kind::Real, "input amplitude (default alpha/3)"},
      {"cutoff", Kind::Int, "Fock cutoff"},
      {"quad_order", Kind::Int, "base Bloch quadrature order"}}},
};

struct Slot {
  double real = 0.0;
  long long integer = 0;
  std::string text;
  CLI::Option* opt = nullptr;
  Kind kind = Kind::Real;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid spin / coherent-state teleportation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::map<std::string, Slot>> slots;
  std::map<std::string, CLI::App*> subs;

  for (const auto& [kind, keys] : kPerKind) {
    CLI::App* sub = app.add_subcommand(kind);
    subs[kind] = sub;
    sub->add_option("--config", config_path, "flat JSON config file");
    auto& mine = slots[kind];
    std::vector<Key> all = kCommon;
    all.insert(all.end(), keys.begin(), keys.end());
    for (const auto& k : all) {
      Slot& s = mine[k.name];
      s.kind = k.kind;
      const std::string flag = "--" + k.name;
      switch (k.kind) {
        case Kind::Real: s.opt = sub->add_option(flag, s.real, k.help); break;
        case Kind::Int: s.opt = sub->add_option(flag, s.integer, k.help); break;
        case Kind::Text: s.opt = sub->add_option(flag, s.text, k.help); break;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : int(cvdv::ExitCode::Config);
  }

  std::string kind;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) kind = name;

  try {
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& [name, s] : slots[kind]) {
      if (s.opt->count() == 0) continue;
      switch (s.kind) {
        case Kind::Real: overrides[name] = s.real; break;
        case Kind::Int: overrides[name] = s.integer; break;
        case Kind::Text: overrides[name] = s.text; break;
      }
    }
    nlohmann::json base = config_path.empty() ? nlohmann::json::object() : cvdv::load_flat_config(config_path);
    const auto cfg = cvdv::ExperimentConfig::from_json(kind, cvdv::merge_flat(base, overrides));
    return cvdv::run_experiment(cfg, std::cout);
  } catch (const cvdv::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return int(cvdv::ExitCode::Config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
