#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace esclab {

using Vec = std::vector<double>;

double norm(const Vec &v);
double dot(const Vec &a, const Vec &b);

// Empirical certificate for the power-law gradient sandwich
//   kappa * Jt^{2-1/m} <= |grad J|^2 <= gamma * Jt^{2-1/m}
// on a ball of radius domain_radius around the minimizer, Jt = J - J(x*).
struct A1Certificate {
  double m = 1.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double domain_radius = 0.0;
};

// Cost function with analytic gradient. The minimizer metadata (x_star,
// j_star) exists for validation and analysis only; no control law may read
// it, which the test suite enforces by poisoning.
class CostModel {
public:
  using EvalFn = std::function<double(const Vec &)>;
  using GradFn = std::function<Vec(const Vec &)>;

  CostModel(std::string name, int dim, EvalFn eval, GradFn grad, Vec x_star,
            double j_star, double domain_radius,
            std::optional<A1Certificate> a1 = std::nullopt);

  const std::string &name() const { return name_; }
  int dim() const { return dim_; }
  double eval(const Vec &x) const { return eval_(x); }
  Vec grad(const Vec &x) const { return grad_(x); }
  const Vec &x_star() const { return x_star_; }
  double j_star() const { return j_star_; }
  double domain_radius() const { return domain_radius_; }
  const std::optional<A1Certificate> &a1() const { return a1_; }
  void set_a1(const A1Certificate &c) { a1_ = c; }

  // J(x) - J(x*); nonnegative on the declared domain.
  double eval_shifted(const Vec &x) const { return eval_(x) - j_star_; }

  // Copy with garbage minimizer metadata. Trajectories of every control law
  // must be bit-identical under this substitution.
  CostModel with_poisoned_metadata() const;

private:
  struct unchecked_tag {};
  CostModel(unchecked_tag, std::string name, int dim, EvalFn eval, GradFn grad,
            Vec x_star, double j_star, double domain_radius,
            std::optional<A1Certificate> a1);

  std::string name_;
  int dim_;
  EvalFn eval_;
  GradFn grad_;
  Vec x_star_;
  double j_star_;
  double domain_radius_;
  std::optional<A1Certificate> a1_;
};

// Central-difference gradient; test oracle only.
Vec finite_diff_gradient(const CostModel &model, const Vec &x, double h);

struct A1Estimate {
  bool feasible = false;
  bool degenerate = false;  // kappa/gamma below 1e-5: wrong exponent m
  A1Certificate cert;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::string note;
};

// Deterministic grid on the domain ball, minimizer excluded.
std::vector<Vec> a1_grid(const CostModel &model, int points_per_dim = 1000);

A1Estimate estimate_a1_constants(const CostModel &model, double m,
                                 const std::vector<Vec> &grid);
// Serial reference for the parallel kernel above; must agree exactly.
A1Estimate estimate_a1_constants_serial(const CostModel &model, double m,
                                        const std::vector<Vec> &grid);

// Built-in families: quadratic_shifted, quartic, rosenbrock_like.
CostModel make_cost(const std::string &name,
                    const std::map<std::string, double> &params);

}  // namespace esclab
