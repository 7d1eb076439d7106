#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bousslab/config.hpp"
#include "bousslab/errors.hpp"
#include "bousslab/experiment.hpp"

using namespace bousslab;

namespace {

// flag name -> config key
const std::pair<const char*, const char*> kFlags[] = {
    {"--preset", "preset"}, {"--a", "a"},       {"--b", "b"},
    {"--c", "c"},           {"--d", "d"},       {"--diss", "diss"},
    {"--L", "L"},           {"--dx", "dx"},     {"--dt", "dt"},
    {"--T", "T"},           {"--x0", "x0"},     {"--dealias", "dealias"},
    {"--asselin", "asselin"}, {"--sample-every", "sample_every"}, {"--out", "output"},
};

struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key=value config file (flags override it)");
    for (auto [flag, key] : kFlags) app->add_option(flag, values[key], std::string("config key ") + key);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) throw ConfigError("cannot read config file " + config_file);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_config(ss.str());
    }
    std::string overrides;
    for (auto [flag, key] : kFlags) {
      const auto& v = values.at(key);
      if (!v.empty()) overrides += std::string(key) + "=" + v + "\n";
    }
    return parse_config(overrides, cfg);
  }
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto v = parse_double(cell);
    if (!v || !(*v > 0)) throw ConfigError("bad wavenumber '" + cell + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decay experiments for damped abcd Boussinesq systems"};
  app.require_subcommand(1);

  ConfigFlags classify_flags, simulate_flags, linear_flags, sweep_flags;
  bool all_presets = false, snapshot = false;
  std::string efold;
  std::vector<std::string> axes;

  auto* classify_cmd = app.add_subcommand("classify", "Decay class and frequency thresholds");
  classify_flags.attach(classify_cmd);
  classify_cmd->add_flag("--all-presets", all_presets, "every preset under complete and partial-u damping");

  auto* simulate_cmd = app.add_subcommand("simulate", "Nonlinear run from soliton data");
  simulate_flags.attach(simulate_cmd);
  simulate_cmd->add_flag("--snapshot", snapshot, "also write the final state to final.bin");

  auto* linear_cmd = app.add_subcommand("linear", "Exact linear evolution from soliton data");
  linear_flags.attach(linear_cmd);
  linear_cmd->add_option("--efold", efold, "comma separated wavenumbers for the e-folding table");

  auto* sweep_cmd = app.add_subcommand("sweep", "Independent simulate runs over a parameter grid");
  sweep_flags.attach(sweep_cmd);
  sweep_cmd->add_option("--grid", axes, "axis like dt=0.1,0.05,0.025 (repeatable)");

  auto* presets_cmd = app.add_subcommand("presets", "List the built-in systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*presets_cmd) return cmd_presets(std::cout);
    if (*classify_cmd) {
      const auto cfg = classify_flags.resolve();
      std::vector<ClassifyTarget> targets;
      if (all_presets) targets = all_preset_targets();
      else targets.push_back({cfg.label(), cfg.spec()});
      return cmd_classify(targets, classify_flags.values.at("output"), std::cout);
    }
    if (*simulate_cmd) return cmd_simulate(simulate_flags.resolve(), std::cout, std::cerr, snapshot);
    if (*linear_cmd)
      return cmd_linear(linear_flags.resolve(), efold.empty() ? std::vector<double>{} : parse_list(efold),
                        std::cout, std::cerr);
    if (*sweep_cmd) {
      std::vector<SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(parse_axis(a));
      return cmd_sweep(sweep_flags.resolve(), parsed, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConstraintViolation& e) {
    std::cerr << "invalid system: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BlowUp& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
