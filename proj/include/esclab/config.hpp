#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "esclab/cost.hpp"

namespace esclab {

// Flat key-value experiment configuration, one experiment per file.
// Lines are "section.key = value", '#' starts a comment.
struct ExperimentConfig {
  // cost
  std::string cost_name;
  std::map<std::string, double> cost_params;
  double a1_m = 1.0;
  // pair
  std::string pair_family;
  double pair_param = 0.0;
  // dither
  double omega = 2.0;
  std::vector<int> multipliers;
  // initial state
  Vec x0;
  double z0_init = 0.0;
  double omega0_init = 0.0;  // Suttner phase Omega(0)
  // practical set; y0/delta may be resolved from "auto"
  double J0 = 0, z0 = 0, epsilon = 0;
  bool y0_auto = true;
  double y0 = 0;
  bool delta_auto = true;
  double delta = 0;
  // integration
  double t_end = 40.0;
  int steps_per_period = 64;
  // systems
  std::vector<std::string> systems;
  double grushkovskaya_offset = 2019.0;
  // output
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  static ExperimentConfig parse_file(const std::string &path);
  static ExperimentConfig parse_text(const std::string &text);

  // Collects every violation; empty result means the config is runnable.
  std::vector<std::string> validate() const;
};

std::map<std::string, std::string> parse_flat_kv(const std::string &text);

}  // namespace esclab
