#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esclab/experiment.hpp"

using namespace esclab;

int main(int argc, char **argv) {
  CLI::App app{"esc_lab: extremum seeking experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<double> omegas;

  auto *run = app.add_subcommand("run", "integrate the configured systems");
  run->add_option("config", config_path, "experiment config file")->required();

  auto *sweep = app.add_subcommand("sweep", "frequency sweep of the proposed system");
  sweep->add_option("config", config_path, "experiment config file")->required();
  sweep->add_option("--omegas", omegas, "base frequencies to sweep")
      ->required()
      ->expected(-2)
      ->delimiter(',');

  auto *validate = app.add_subcommand("validate", "check C1/C2/A1 and report omega*");
  validate->add_option("config", config_path, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // usage errors map onto the validation-failure exit code
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
    auto errs = cfg.validate();
    if (!errs.empty()) {
      std::cerr << "config validation failed:\n";
      for (const auto &e : errs) std::cerr << "  - " << e << "\n";
      return 1;
    }
    if (run->parsed()) {
      int rc = run_experiment(cfg);
      std::cout << "outputs written to " << output_dir_for(cfg) << "\n";
      if (rc == 2) std::cout << "note: at least one system aborted or truncated\n";
      return rc;
    }
    if (sweep->parsed()) {
      int rc = run_sweep(cfg, omegas);
      std::cout << "sweep table written to " << output_dir_for(cfg) << "/sweep.csv\n";
      return rc;
    }
    if (validate->parsed()) {
      ConditionReport rep = validate_conditions(cfg);
      std::cout << rep.text;
      return rep.pass ? 0 : 1;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
