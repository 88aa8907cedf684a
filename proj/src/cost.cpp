#include "esclab/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace esclab {

double norm(const Vec &v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const Vec &a, const Vec &b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CostModel::CostModel(std::string name, int dim, EvalFn eval, GradFn grad,
                     Vec x_star, double j_star, double domain_radius,
                     std::optional<A1Certificate> a1)
    : CostModel(unchecked_tag{}, std::move(name), dim, std::move(eval),
                std::move(grad), std::move(x_star), j_star, domain_radius,
                std::move(a1)) {
  if (dim_ <= 0) throw std::invalid_argument("CostModel: dim must be positive");
  if (static_cast<int>(x_star_.size()) != dim_)
    throw std::invalid_argument("CostModel: x_star dimension mismatch");
  if (domain_radius_ <= 0)
    throw std::invalid_argument("CostModel: domain_radius must be positive");

  Vec g0 = grad_(x_star_);
  if (norm(g0) > 1e-9)
    throw std::invalid_argument("CostModel: grad(x_star) != 0");

  // Spot checks on a deterministic ring of sample points: J > j_star away
  // from the minimizer and grad consistent with central differences.
  for (int k = 0; k < 16; ++k) {
    double r = domain_radius_ * (0.1 + 0.05 * k);
    Vec x = x_star_;
    for (int i = 0; i < dim_; ++i)
      x[i] += r * std::cos(0.7 * (k + 1) + 2.1 * i) /
              std::sqrt(static_cast<double>(dim_));
    if (eval_(x) <= j_star_)
      throw std::invalid_argument("CostModel: eval(x) <= j_star off-minimum");
    Vec ga = grad_(x);
    Vec gf = finite_diff_gradient(*this, x, 1e-5);
    double scale = std::max(1.0, norm(ga));
    Vec d(dim_);
    for (int i = 0; i < dim_; ++i) d[i] = ga[i] - gf[i];
    if (norm(d) / scale > 1e-6)
      throw std::invalid_argument("CostModel: grad disagrees with finite differences");
  }
}

CostModel::CostModel(unchecked_tag, std::string name, int dim, EvalFn eval,
                     GradFn grad, Vec x_star, double j_star,
                     double domain_radius, std::optional<A1Certificate> a1)
    : name_(std::move(name)),
      dim_(dim),
      eval_(std::move(eval)),
      grad_(std::move(grad)),
      x_star_(std::move(x_star)),
      j_star_(j_star),
      domain_radius_(domain_radius),
      a1_(std::move(a1)) {}

CostModel CostModel::with_poisoned_metadata() const {
  Vec bad_star(dim_, 7.77e77);
  return CostModel(unchecked_tag{}, name_ + "_poisoned", dim_, eval_, grad_,
                   std::move(bad_star), -9.99e99, domain_radius_, a1_);
}

Vec finite_diff_gradient(const CostModel &model, const Vec &x, double h) {
  if (h <= 0) throw std::invalid_argument("finite_diff_gradient: h must be positive");
  Vec g(model.dim());
  Vec xp = x, xm = x;
  for (int i = 0; i < model.dim(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (model.eval(xp) - model.eval(xm)) / (2 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

std::vector<Vec> a1_grid(const CostModel &model, int points_per_dim) {
  const int n = model.dim();
  const double R = model.domain_radius();
  std::vector<Vec> grid;
  if (n == 1) {
    grid.reserve(points_per_dim);
    for (int k = 0; k < points_per_dim; ++k) {
      double x = model.x_star()[0] - R +
                 2 * R * (k + 0.5) / static_cast<double>(points_per_dim);
      if (std::abs(x - model.x_star()[0]) < 1e-12) continue;
      grid.push_back({x});
    }
  } else {
    // Tensor grids explode with dimension; fall back to a deterministic
    // low-discrepancy-ish lattice capped at points_per_dim^2 samples.
    int total = points_per_dim * points_per_dim;
    grid.reserve(total);
    for (int k = 0; k < total; ++k) {
      Vec x = model.x_star();
      double r = R * (k + 0.5) / static_cast<double>(total);
      for (int i = 0; i < n; ++i)
        x[i] += r * std::cos(2.399963 * k + 1.8 * i);
      double d = 0;
      for (int i = 0; i < n; ++i) {
        double t = x[i] - model.x_star()[i];
        d += t * t;
      }
      if (d < 1e-24) continue;
      grid.push_back(std::move(x));
    }
  }
  return grid;
}

namespace {

A1Estimate a1_from_ratios(const std::vector<double> &ratios, double m,
                          double R) {
  A1Estimate est;
  if (ratios.empty()) {
    est.note = "empty grid";
    return est;
  }
  double lo = ratios[0], hi = ratios[0];
  for (double r : ratios) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  est.min_ratio = lo;
  est.max_ratio = hi;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    est.note = "non-finite ratio on grid";
    return est;
  }
  if (lo < 1e-12) {
    est.note = "ratio degenerates on grid (wrong m for this cost)";
    return est;
  }
  est.feasible = true;
  est.degenerate = lo < 1e-5 * hi;
  if (est.degenerate) est.note = "kappa/gamma below 1e-5; m is a poor fit";
  est.cert = A1Certificate{m, lo, hi, R};
  return est;
}

std::vector<double> a1_ratios(const CostModel &model, double m,
                              const std::vector<Vec> &grid, bool parallel) {
  std::vector<double> ratios(grid.size());
  const double p = 2.0 - 1.0 / m;
#pragma omp parallel for schedule(static) if (parallel)
  for (long k = 0; k < static_cast<long>(grid.size()); ++k) {
    double jt = model.eval_shifted(grid[k]);
    Vec g = model.grad(grid[k]);
    double g2 = dot(g, g);
    ratios[k] = g2 / std::pow(jt, p);
  }
  return ratios;
}

}  // namespace

A1Estimate estimate_a1_constants(const CostModel &model, double m,
                                 const std::vector<Vec> &grid) {
  if (m < 1.0) throw std::invalid_argument("estimate_a1_constants: m must be >= 1");
  return a1_from_ratios(a1_ratios(model, m, grid, true), m,
                        model.domain_radius());
}

A1Estimate estimate_a1_constants_serial(const CostModel &model, double m,
                                        const std::vector<Vec> &grid) {
  if (m < 1.0) throw std::invalid_argument("estimate_a1_constants: m must be >= 1");
  return a1_from_ratios(a1_ratios(model, m, grid, false), m,
                        model.domain_radius());
}

CostModel make_cost(const std::string &name,
                    const std::map<std::string, double> &params) {
  auto get = [&](const std::string &key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  int dim = static_cast<int>(get("dim", 1));
  double radius = get("radius", 4.0);

  if (name == "quadratic_shifted") {
    double center = get("center", 1.0);
    double curv = get("curvature", 1.0);
    double offset = get("offset", 2020.0);
    if (curv <= 0) throw std::invalid_argument("quadratic_shifted: curvature must be positive");
    Vec xs(dim, center);
    auto eval = [curv, center, offset](const Vec &x) {
      double s = 0;
      for (double xi : x) s += (xi - center) * (xi - center);
      return 0.5 * curv * s + offset;
    };
    auto grad = [curv, center](const Vec &x) {
      Vec g(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = curv * (x[i] - center);
      return g;
    };
    return CostModel("quadratic_shifted", dim, eval, grad, xs, offset, radius);
  }
  if (name == "quartic") {
    double center = get("center", 0.0);
    double offset = get("offset", 0.0);
    Vec xs(dim, center);
    auto eval = [center, offset](const Vec &x) {
      double s = 0;
      for (double xi : x) {
        double t = xi - center;
        s += t * t * t * t;
      }
      return s + offset;
    };
    auto grad = [center](const Vec &x) {
      Vec g(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        double t = x[i] - center;
        g[i] = 4 * t * t * t;
      }
      return g;
    };
    return CostModel("quartic", dim, eval, grad, xs, offset, radius);
  }
  if (name == "rosenbrock_like") {
    // Mildly conditioned two-dimensional valley with minimum at (1, 1).
    double b = get("b", 5.0);
    double offset = get("offset", 0.0);
    auto eval = [b, offset](const Vec &x) {
      double t1 = 1 - x[0];
      double t2 = x[1] - x[0] * x[0];
      return t1 * t1 + b * t2 * t2 + offset;
    };
    auto grad = [b](const Vec &x) {
      double t2 = x[1] - x[0] * x[0];
      return Vec{-2 * (1 - x[0]) - 4 * b * x[0] * t2, 2 * b * t2};
    };
    return CostModel("rosenbrock_like", 2, eval, grad, Vec{1.0, 1.0}, offset,
                     get("radius", 1.5));
  }
  throw std::invalid_argument("make_cost: unknown cost family '" + name + "'");
}

}  // namespace esclab
