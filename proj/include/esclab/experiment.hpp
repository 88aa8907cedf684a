#pragma once

#include <string>
#include <vector>

#include "esclab/analysis.hpp"
#include "esclab/config.hpp"
#include "esclab/dynamics.hpp"

namespace esclab {

// Config resolved into live objects (A1 certificate estimated, y0/delta
// auto values filled in).
struct PreparedExperiment {
  CostModel cost;
  GeneratingPair pair;
  DitherBank bank;
  PracticalSetSpec set;
};

PreparedExperiment prepare(const ExperimentConfig &cfg);

struct SystemRun {
  std::string system;
  Trajectory traj;
  int n_x = 0;
  bool has_z = false;
  bool has_omega_phase = false;
  bool ok = false;         // ran without throwing
  std::string error;       // exception text when !ok
};

SystemRun run_system(const PreparedExperiment &prep, const ExperimentConfig &cfg,
                     const std::string &system);

// Writes one trajectory CSV per requested system plus summary.txt.
// Returns 0 on full success, 2 when any requested system aborted or
// truncated; sibling systems always produce their outputs.
int run_experiment(const ExperimentConfig &cfg);

struct SweepRow {
  double omega = 0;
  double sup_deviation = 0;   // vs the averaged trajectory, matched grids
  double max_g_excursion = 0; // max over samples of max_i g_i
  double final_x_err = 0;
  double final_z_err = 0;
  bool truncated = false;
};

std::vector<SweepRow> sweep_omega(const ExperimentConfig &cfg,
                                  const std::vector<double> &omegas,
                                  bool parallel = true);
int run_sweep(const ExperimentConfig &cfg, const std::vector<double> &omegas);

struct ConditionReport {
  double wronskian_residual = 0;
  bool wronskian_pass = false;
  bool pair_c1_flagged = false;
  A1Estimate a1;
  C2BoundReport c2;
  double omega_star = -1;
  double y0_bound = 0;
  double y0_used = 0;
  bool pass = false;
  std::string text;  // human-readable certificate
};

ConditionReport validate_conditions(const ExperimentConfig &cfg);

// CSV trajectory writer; columns t, x_1..x_n, (z), (Omega), u_1..u_n,
// (g1, g2, g3, y). Floats at 17 significant digits, subsampled to at most
// max_rows rows.
void write_trajectory_csv(const std::string &path, const SystemRun &run,
                          const CostModel &cost, const PracticalSetSpec &set,
                          std::size_t max_rows = 100000);

std::string output_dir_for(const ExperimentConfig &cfg);

}  // namespace esclab
