#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "esclab/cost.hpp"
#include "esclab/dither.hpp"
#include "esclab/generators.hpp"

namespace esclab {

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> state;
  std::vector<Vec> control;
  std::size_t rhs_evals = 0;
  bool truncated = false;
  std::string abort_reason;
  int record_stride = 1;
};

// Right-hand side plus the instantaneous control vector for logging.
// Returns false when the state leaves the system's domain.
struct OdeSystem {
  int state_dim = 0;
  int control_dim = 0;
  std::function<bool(double t, const Vec &s, Vec &ds, Vec &u)> rhs;
  std::function<bool(const Vec &s)> in_domain;
  // Phase rate for step-size limiting (Suttner's adaptive frequency);
  // empty for fixed-step systems.
  std::function<double(const Vec &s)> phase_rate;
  double fastest_period = 1.0;
};

struct IntegrateOptions {
  int steps_per_fastest_period = 64;
  int record_stride = 1;
  std::size_t max_steps = 20'000'000;
  double min_step = 1e-14;
};

using StepObserver = std::function<void(double t, const Vec &s, const Vec &u)>;

// Classical fixed-step RK4 with step h = fastest_period / steps_per_period.
// When phase_rate is set, h shrinks so the phase advance per step stays
// below 2*pi / steps_per_period; underflow of h truncates the run.
Trajectory integrate(const OdeSystem &sys, const Vec &s0, double t_end,
                     const IntegrateOptions &opts = {},
                     const StepObserver &observer = {});

// theta = (x, z), strict epigraph z > J(x) required. Requires a C1 pair.
OdeSystem make_proposed(const CostModel &cost, const GeneratingPair &pair,
                        const DitherBank &bank);

// Averaged system xdot = -grad J, zdot = -z + J(x).
OdeSystem make_lie_approx(const CostModel &cost);

// Offset-shifted baseline: xdot_j = sum_s (-1)^s F_s(J(x) - offset) u_{j,s}.
OdeSystem make_grushkovskaya(const CostModel &cost, const GeneratingPair &pair,
                             const DitherBank &bank, double offset);

// Adaptive-frequency baseline: state (x, z, Omega),
//   xdot = (1/y^2) sin(Omega + 1/y), zdot = -y, Omegadot = 1/y^5.
OdeSystem make_suttner(const CostModel &cost);

}  // namespace esclab
