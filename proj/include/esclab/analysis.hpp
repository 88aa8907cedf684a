#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esclab/cost.hpp"
#include "esclab/dither.hpp"
#include "esclab/dynamics.hpp"
#include "esclab/generators.hpp"

namespace esclab {

// Constants (J0, z0, y0, eps, delta) defining the practical sets
// Delta_0 = {g_i <= 0} and Delta_eps = {g_i <= eps} inside the strict
// epigraph.
struct PracticalSetSpec {
  double J0 = 0, z0 = 0, y0 = 0, epsilon = 0, delta = 0;

  static double y0_lower_bound(double kappa, double epsilon);

  // Validates positivity, z0 > J0, delta in (0, eps), the y0 bound when a
  // certificate is supplied, and (sampled) containment of the J0 level set
  // in the cost domain.
  static PracticalSetSpec make(double J0, double z0, double y0, double epsilon,
                               double delta, const CostModel &cost);
  // y0 resolved to y0_lower_bound(kappa, eps) + margin; needs cost.a1().
  static PracticalSetSpec make_auto_y0(double J0, double z0, double epsilon,
                                       const CostModel &cost,
                                       double margin = 1e-3);
};

// theta is the stacked state (x_1..x_n, z).
std::array<double, 3> eval_g(const PracticalSetSpec &spec, const CostModel &cost,
                             const Vec &theta);

struct DeltaMembership {
  bool member = false;
  std::array<double, 3> g{};
  std::array<bool, 3> near_active{};  // within delta of the level
};
DeltaMembership in_delta(const PracticalSetSpec &spec, const CostModel &cost,
                         const Vec &theta, double level);

// Appendix-style closed forms of the averaged-flow derivative of g_i.
double closed_form_Fg(const PracticalSetSpec &spec, const CostModel &cost,
                      const Vec &theta, int which);

// Control-affine fields of the epigraph system over theta = (x, z).
struct VectorFields {
  int n = 0;
  std::function<Vec(const Vec &)> f0;
  std::vector<std::function<Vec(const Vec &)>> f;  // per channel
  std::vector<Channel> channels;
};
VectorFields epigraph_fields(const CostModel &cost, const GeneratingPair &pair);

// Finite-difference Lie machinery. The default step is h = 1e-5 max(1,
// |theta|) clamped to 1e-4 of the epigraph gap z - J(x), which keeps
// first-level derivatives accurate to ~1e-6; nested differentiation of
// already-differenced quantities passes a coarser step explicitly to stay
// above the noise floor.
using ScalarField = std::function<double(const Vec &)>;
using VectorField = std::function<Vec(const Vec &)>;
double fd_lie_derivative(const ScalarField &g, const VectorField &f,
                         const Vec &theta, double interior_gap,
                         double step = 0.0);
Vec fd_bracket(const VectorField &f1, const VectorField &f2, const Vec &theta,
               double interior_gap, double step = 0.0);
ScalarField make_g(const PracticalSetSpec &spec, const CostModel &cost, int which);

struct LemmaOneBreakdown {
  double F_g = 0, R1 = 0, R2 = 0;
  bool finite = true;
};
LemmaOneBreakdown lemma1_terms(const CostModel &cost, const GeneratingPair &pair,
                               const DitherBank &bank,
                               const PracticalSetSpec &spec, const Vec &theta,
                               double t, int which_g);

// |g(end) - g(start) - [R1(t2)-R1(t1)] - int (F^g + R2)| over [t1, t2] of a
// proposed-system trajectory, trapezoid rule on the recorded grid.
double lemma1_residual(const Trajectory &traj, const CostModel &cost,
                       const GeneratingPair &pair, const DitherBank &bank,
                       const PracticalSetSpec &spec, int which_g, double t1,
                       double t2);

// Deterministic samples of the band {0 <= g_i <= eps} within Delta_eps
// (i in 1..3) or of Delta_0 itself (i == 0).
std::vector<Vec> sample_delta_band(const PracticalSetSpec &spec,
                                   const CostModel &cost, int which,
                                   int count, std::uint64_t seed);

C2BoundReport sample_c2_bounds(const GeneratingPair &pair, const CostModel &cost,
                               const PracticalSetSpec &spec,
                               const DitherBank &bank, int samples_per_band,
                               std::uint64_t seed, bool parallel = true);

// omega* = max_i max{(2 c1_i / delta)^2, (c2_i / b_i)^2}.
double estimate_omega_star(const C2BoundReport &report, double delta);

// Trailing-window sup of the max-norm of the logged control.
std::vector<std::pair<double, double>> control_envelope(const Trajectory &traj,
                                                        double window);
double envelope_at(const std::vector<std::pair<double, double>> &env, double t);

struct ConvergenceReport {
  double final_x_err = 0;      // |x(T) - x*|
  double final_z_err = 0;      // z(T) - J(x*)
  int monotonicity_violations = 0;
  int floor_violations = 0;    // z~(t) < 0.999 z~(0) e^{-t}
  int delta_exit_events = 0;   // samples with max_i g_i > eps + 1e-6
  bool truncated = false;
  std::string abort_reason;
};
// n_x: number of x components; has_z: whether state[n_x] is the epigraph
// variable. spec enables the Delta_eps exit count.
ConvergenceReport convergence_report(const Trajectory &traj, const CostModel &cost,
                                     int n_x, bool has_z,
                                     const PracticalSetSpec *spec = nullptr);

}  // namespace esclab
