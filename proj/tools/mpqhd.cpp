// mpqhd command-line driver: list | fields | tensors | check | cyl | report.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mpqhd/config.hpp"
#include "mpqhd/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Many-particle quantum hydrodynamics fields, tensors and balance-law checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file, scenario, out, seed_text;
  std::optional<std::size_t> levels, points, cap;
  std::optional<double> eps;

  app.add_option("--config", config_file, "key = value run configuration file")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "bundled scenario name (see 'list')");
  app.add_option("--levels", levels, "number of refinement grids, from the fine end of the scenario's list");
  app.add_option("--out", out, "output directory (default: mpqhd-out)");
  app.add_option("--eps", eps, "density threshold for velocity masks");
  app.add_option("--cap-override", cap, "raise the configuration-grid point cap (default 2^24)");
  app.add_option("--seed", seed_text, "64-bit seed for randomized checks (decimal or 0x hex)");
  app.add_option("--points", points, "points per axis for the reference state (fields/tensors/cyl)");

  std::string positional;
  const char* help[] = {"list bundled scenarios (optional name filter)", "write density, current, velocity, "
                        "quantum-pressure and force fields", "write momentum-flow and pressure tensors",
                        "run every residual / identity check for a scenario",
                        "cylindrical-coordinate consistency checks (azimuthal states)",
                        "acceptance report over all (or one) scenarios"};
  std::size_t k = 0;
  for (const auto& v : mpqhd::verbs()) {
    auto* sub = app.add_subcommand(v, help[k++]);
    sub->add_option("target", positional, v == "list" ? "name filter" : "scenario name");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mpqhd::exit_code::invalid;
  }

  mpqhd::RunConfig cfg;
  try {
    if (!config_file.empty()) cfg = mpqhd::load_config(config_file);
    cfg.verb = app.get_subcommands().front()->get_name();
    if (cfg.verb == "list") {
      cfg.filter = positional;
    } else {
      if (!positional.empty() && !scenario.empty() && positional != scenario)
        throw mpqhd::ConfigError("scenario given twice ('" + positional + "' and --scenario " + scenario + ")");
      if (!positional.empty()) scenario = positional;
      if (!scenario.empty()) {
        if (cfg.custom) throw mpqhd::ConfigError("--scenario conflicts with the inline system in the config file");
        cfg.scenario = scenario;
      }
    }
    if (levels) cfg.levels = *levels;
    if (points) cfg.points = *points;
    if (eps) cfg.eps = *eps;
    if (cap) cfg.cap = *cap;
    if (!out.empty()) cfg.out = out;
    if (!seed_text.empty()) {
      auto s = mpqhd::detail::to_u64(seed_text);
      if (!s) throw mpqhd::ConfigError("--seed: expected a 64-bit unsigned integer, got '" + seed_text + "'");
      cfg.seed = *s;
    }
  } catch (const mpqhd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mpqhd::exit_code::invalid;
  }
  return mpqhd::run(cfg, std::cout, std::cerr);
}
