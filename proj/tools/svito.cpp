// svito command line: each subcommand builds an ExperimentConfig from its flags
// (or from --config) and hands it to the runner.

#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "svito/svito.hpp"

using namespace svito;

namespace {

struct Flag {
  const char* name;  // --name
  const char* key;   // parameter it sets
  const char* help;
};

const std::map<std::string, std::vector<Flag>> kFlags{
    {"algebra-check",
     {{"trials", "trials", "randomized interval triples"},
      {"box-trials", "box_trials", "randomized box triples"},
      {"tol", "tol", "Hausdorff tolerance"},
      {"max-box-dim", "max_box_dim", "largest box dimension"},
      {"seed", "seed", "random seed"}}},
    {"isometry",
     {{"set", "set", "constant integrand, e.g. \"[0,1]\""},
      {"paths", "paths", "Monte Carlo paths M"},
      {"steps", "steps", "time steps N"},
      {"selections", "selections", "selections K"},
      {"recipe", "recipe", "extreme | support | mix"},
      {"horizon", "horizon", "horizon T"},
      {"seed", "seed", "random seed"}}},
    {"ito-verify",
     {{"phi", "phi", "identity | square | time-x | translate:<c>"},
      {"x0", "x0", "initial point"},
      {"f", "f", "diffusion coefficient set"},
      {"g", "g", "drift coefficient set"},
      {"steps", "steps", "time steps N"},
      {"paths", "paths", "Monte Carlo paths M"},
      {"selections", "selections", "selections K"},
      {"recipe", "recipe", "extreme | support | mix"},
      {"horizon", "horizon", "horizon T"},
      {"seed", "seed", "random seed"}}},
    {"bsde-solve", {}},
    {"accept-all", {{"seed", "seed", "base seed"}}},
    {"brownian",
     {{"seed", "seed", "random seed"},
      {"steps", "steps", "time steps N"},
      {"paths", "paths", "paths M"},
      {"horizon", "horizon", "horizon T"},
      {"dims", "dims", "Brownian dimension"}}},
    {"selections",
     {{"set", "set", "constant set"},
      {"steps", "steps", "time steps N"},
      {"paths", "paths", "paths M"},
      {"selections", "selections", "selections K"},
      {"recipe", "recipe", "extreme | support | mix"},
      {"horizon", "horizon", "horizon T"},
      {"seed", "seed", "random seed"}}},
};

const std::map<std::string, const char*> kAbout{
    {"algebra-check", "randomized Hukuhara/Minkowski identity suite"},
    {"isometry", "set-valued Ito isometry for a constant integrand"},
    {"ito-verify", "set-valued Ito formula discrepancy report"},
    {"bsde-solve", "Picard solver for a set-valued BSDE (needs --config)"},
    {"accept-all", "run the acceptance suite"},
    {"brownian", "export Brownian increments"},
    {"selections", "export and audit an adapted selection family"},
};

/// Converts a flag value to the JSON type of the parameter's default.
Json typed(const std::string& command, const std::string& key, const std::string& text) {
  ExperimentConfig defaults = ExperimentConfig::make(command, Json::object());
  const Json& def = defaults.params.at(key);
  if (def.is_number_integer()) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) throw UsageError("--" + key + " expects an integer, got '" + text + "'");
    return v;
  }
  if (def.is_number()) return parse_double(text);
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svito: set-valued stochastic calculus engine"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  app.add_option("--out", out_dir, "output root; runs go to <out>/<command>-<hash>");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [command, flags] : kFlags) {
    auto* sub = app.add_subcommand(command, kAbout.at(command));
    subs[command] = sub;
    sub->add_option("--out", out_dir, "output root");
    sub->add_option("--config", config_paths[command], "JSON config with schema_version, command and params");
    for (const auto& f : flags) sub->add_option(std::string("--") + f.name, values[command][f.key], f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (const auto& [command, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      std::optional<ExperimentConfig> config;
      Json given = Json::object();
      for (const auto& f : kFlags.at(command))
        if (sub->count(std::string("--") + f.name)) given[f.key] = typed(command, f.key, values[command][f.key]);
      if (!config_paths[command].empty()) {
        if (!given.empty()) throw UsageError("--config cannot be combined with parameter flags");
        config = ExperimentConfig::load(config_paths[command]);
        if (config->command != command)
          throw UsageError("config is for '" + config->command + "', not '" + command + "'");
      } else {
        if (command == "bsde-solve") throw UsageError("bsde-solve needs --config");
        config = ExperimentConfig::make(command, given);
      }
      return run(*config, out_dir, std::cout, std::cerr);
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitUsage;
}
