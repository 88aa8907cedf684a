#include "esclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

namespace esclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec theta_x(const Vec &theta, int n) { return Vec(theta.begin(), theta.begin() + n); }

// Fine step for first-level differences of analytic quantities.
double fd_step_fine(const Vec &theta, double interior_gap) {
  double h = 1e-5 * std::max(1.0, norm(theta));
  if (interior_gap > 0) h = std::min(h, 1e-4 * interior_gap);
  return std::max(h, 1e-12);
}

// Coarser step for differencing quantities that are themselves finite
// differences; a fine step there would amplify the inner noise floor.
double fd_step_coarse(const Vec &theta, double interior_gap) {
  double h = 1e-5 * std::max(1.0, norm(theta));
  if (interior_gap > 0) h = std::min(h, 0.01 * interior_gap);
  return std::max(h, 1e-9);
}

double a1_exponent(const CostModel &cost) {
  double m = cost.a1() ? cost.a1()->m : 1.0;
  return 2.0 - 1.0 / m;
}

}  // namespace

double PracticalSetSpec::y0_lower_bound(double kappa, double epsilon) {
  if (kappa <= 0 || epsilon <= 0)
    throw std::invalid_argument("y0_lower_bound: kappa and epsilon must be positive");
  return (1.0 + std::sqrt(1.0 + 8.0 * kappa * epsilon)) / (2.0 * kappa);
}

PracticalSetSpec PracticalSetSpec::make(double J0, double z0, double y0,
                                        double epsilon, double delta,
                                        const CostModel &cost) {
  if (J0 <= 0 || z0 <= 0 || y0 <= 0 || epsilon <= 0)
    throw std::invalid_argument("PracticalSetSpec: constants must be positive");
  if (!(delta > 0 && delta < epsilon))
    throw std::invalid_argument("PracticalSetSpec: delta must lie in (0, epsilon)");
  if (!(z0 > J0))
    throw std::invalid_argument("PracticalSetSpec: z0 must exceed J0");
  if (cost.a1()) {
    double lb = y0_lower_bound(cost.a1()->kappa, epsilon);
    if (!(y0 > lb))
      throw std::invalid_argument("PracticalSetSpec: y0 below the kappa/epsilon bound");
  }
  // Sampled containment of the J0 level set in the domain ball: the shifted
  // cost must exceed J0 everywhere on the boundary sphere.
  const int n = cost.dim();
  const double R = cost.domain_radius();
  for (int k = 0; k < 32; ++k) {
    Vec x = cost.x_star();
    for (int i = 0; i < n; ++i)
      x[i] += R * std::cos(0.19634954 * (2 * k + 1) + 2.3 * i) /
              std::sqrt(static_cast<double>(n));
    // include the axis-aligned extremes for 1-D
    if (n == 1) x[0] = cost.x_star()[0] + (k % 2 == 0 ? R : -R);
    if (cost.eval_shifted(x) <= J0)
      throw std::invalid_argument(
          "PracticalSetSpec: J0 level set not contained in the cost domain");
    if (n == 1 && k >= 1) break;
  }
  return PracticalSetSpec{J0, z0, y0, epsilon, delta};
}

PracticalSetSpec PracticalSetSpec::make_auto_y0(double J0, double z0,
                                                double epsilon,
                                                const CostModel &cost,
                                                double margin) {
  if (!cost.a1())
    throw std::invalid_argument("make_auto_y0: cost has no A1 certificate");
  double y0 = y0_lower_bound(cost.a1()->kappa, epsilon) + margin;
  return make(J0, z0, y0, epsilon, epsilon / 2, cost);
}

std::array<double, 3> eval_g(const PracticalSetSpec &spec, const CostModel &cost,
                             const Vec &theta) {
  const int n = cost.dim();
  Vec x = theta_x(theta, n);
  double jt = cost.eval_shifted(x);
  double y = theta[n] - cost.eval(x);
  if (!(y > 0)) throw std::domain_error("eval_g: state on or below the epigraph boundary");
  double p = a1_exponent(cost);
  return {jt - spec.J0, theta[n] - cost.j_star() - spec.z0,
          std::tanh(std::pow(jt, p)) / y - spec.y0};
}

DeltaMembership in_delta(const PracticalSetSpec &spec, const CostModel &cost,
                         const Vec &theta, double level) {
  DeltaMembership m;
  const int n = cost.dim();
  Vec x = theta_x(theta, n);
  if (!(theta[n] - cost.eval(x) > 0)) return m;  // outside the strict epigraph
  m.g = eval_g(spec, cost, theta);
  m.member = true;
  for (int i = 0; i < 3; ++i) {
    if (m.g[i] > level) m.member = false;
    m.near_active[i] = std::abs(m.g[i] - level) <= spec.delta;
  }
  return m;
}

double closed_form_Fg(const PracticalSetSpec &spec, const CostModel &cost,
                      const Vec &theta, int which) {
  const int n = cost.dim();
  Vec x = theta_x(theta, n);
  double y = theta[n] - cost.eval(x);
  if (!(y > 0)) throw std::domain_error("closed_form_Fg: epigraph boundary");
  if (which == 1) {
    Vec g = cost.grad(x);
    return -dot(g, g);
  }
  if (which == 2) return -y;
  if (which == 3) {
    double jt = cost.eval_shifted(x);
    Vec g = cost.grad(x);
    double g2 = dot(g, g);
    double p = a1_exponent(cost);
    double jp = std::pow(jt, p);
    double eta = std::tanh(jp);
    double etap = 1.0 - eta * eta;  // sech^2
    double third = (jt > 0) ? p * std::pow(jt, p - 1.0) * etap * g2 / y : 0.0;
    return eta / y - eta * g2 / (y * y) - third;
  }
  throw std::invalid_argument("closed_form_Fg: which must be 1, 2 or 3");
  (void)spec;
}

VectorFields epigraph_fields(const CostModel &cost, const GeneratingPair &pair) {
  const int n = cost.dim();
  VectorFields vf;
  vf.n = n;
  vf.f0 = [cost, n](const Vec &theta) {
    Vec x = theta_x(theta, n);
    Vec out(n + 1, 0.0);
    out[n] = -(theta[n] - cost.eval(x));
    return out;
  };
  for (int j = 0; j < n; ++j) {
    for (int s = 1; s <= 2; ++s) {
      auto F = (s == 1) ? pair.f1 : pair.f2;
      vf.f.push_back([cost, n, j, F](const Vec &theta) {
        Vec x = theta_x(theta, n);
        double y = theta[n] - cost.eval(x);
        Vec out(n + 1, 0.0);
        out[j] = F(y);
        return out;
      });
      vf.channels.push_back({j, s});
    }
  }
  return vf;
}

double fd_lie_derivative(const ScalarField &g, const VectorField &f,
                         const Vec &theta, double interior_gap, double step) {
  Vec u = f(theta);
  double un = norm(u);
  if (un == 0.0) return 0.0;
  double h = (step > 0.0) ? step : fd_step_fine(theta, interior_gap);
  Vec p = theta, m = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double d = h * u[i] / un;
    p[i] += d;
    m[i] -= d;
  }
  return (g(p) - g(m)) / (2.0 * h) * un;
}

Vec fd_bracket(const VectorField &f1, const VectorField &f2, const Vec &theta,
               double interior_gap, double step) {
  double h = (step > 0.0) ? step : fd_step_fine(theta, interior_gap);
  Vec u1 = f1(theta), u2 = f2(theta);
  double n1 = norm(u1), n2 = norm(u2);
  Vec out(theta.size(), 0.0);
  if (n1 > 0) {  // (Df2) f1
    Vec p = theta, m = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double d = h * u1[i] / n1;
      p[i] += d;
      m[i] -= d;
    }
    Vec a = f2(p), b = f2(m);
    for (std::size_t i = 0; i < theta.size(); ++i)
      out[i] += (a[i] - b[i]) / (2.0 * h) * n1;
  }
  if (n2 > 0) {  // - (Df1) f2
    Vec p = theta, m = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double d = h * u2[i] / n2;
      p[i] += d;
      m[i] -= d;
    }
    Vec a = f1(p), b = f1(m);
    for (std::size_t i = 0; i < theta.size(); ++i)
      out[i] -= (a[i] - b[i]) / (2.0 * h) * n2;
  }
  return out;
}

ScalarField make_g(const PracticalSetSpec &spec, const CostModel &cost,
                   int which) {
  const int n = cost.dim();
  double p = a1_exponent(cost);
  if (which == 1)
    return [cost, spec, n](const Vec &theta) {
      return cost.eval_shifted(theta_x(theta, n)) - spec.J0;
    };
  if (which == 2)
    return [cost, spec, n](const Vec &theta) {
      return theta[n] - cost.j_star() - spec.z0;
    };
  if (which == 3)
    return [cost, spec, n, p](const Vec &theta) {
      Vec x = theta_x(theta, n);
      double y = theta[n] - cost.eval(x);
      if (!(y > 0)) return std::nan("");
      return std::tanh(std::pow(cost.eval_shifted(x), p)) / y - spec.y0;
    };
  throw std::invalid_argument("make_g: which must be 1, 2 or 3");
}

namespace {

struct LieTable {
  // Cached composed Lie-derivative scalar fields for one g.
  ScalarField g;
  VectorFields vf;
  std::function<double(const Vec &)> gap;
  std::vector<ScalarField> lvl1;                // L_{f_l} g
  std::vector<std::vector<ScalarField>> lvl2;   // L_{f_l2} L_{f_l1} g, [l1][l2]
};

LieTable build_lie_table(const CostModel &cost, const GeneratingPair &pair,
                         const PracticalSetSpec &spec, int which_g) {
  LieTable tab;
  tab.g = make_g(spec, cost, which_g);
  tab.vf = epigraph_fields(cost, pair);
  const int n = cost.dim();
  tab.gap = [cost, n](const Vec &theta) {
    return theta[n] - cost.eval(theta_x(theta, n));
  };
  const int L = static_cast<int>(tab.vf.f.size());
  for (int l = 0; l < L; ++l) {
    ScalarField g = tab.g;
    VectorField f = tab.vf.f[l];
    auto gap = tab.gap;
    tab.lvl1.push_back([g, f, gap](const Vec &th) {
      return fd_lie_derivative(g, f, th, gap(th));
    });
  }
  tab.lvl2.resize(L);
  for (int l1 = 0; l1 < L; ++l1) {
    for (int l2 = 0; l2 < L; ++l2) {
      ScalarField inner = tab.lvl1[l1];
      VectorField f = tab.vf.f[l2];
      auto gap = tab.gap;
      tab.lvl2[l1].push_back([inner, f, gap](const Vec &th) {
        double y = gap(th);
        return fd_lie_derivative(inner, f, th, y, fd_step_coarse(th, y));
      });
    }
  }
  return tab;
}

}  // namespace

LemmaOneBreakdown lemma1_terms(const CostModel &cost, const GeneratingPair &pair,
                               const DitherBank &bank,
                               const PracticalSetSpec &spec, const Vec &theta,
                               double t, int which_g) {
  LieTable tab = build_lie_table(cost, pair, spec, which_g);
  const int L = static_cast<int>(tab.vf.f.size());
  const int n = cost.dim();
  double gap = tab.gap(theta);

  LemmaOneBreakdown out;

  // F^g = L_{f0} g + sum_j L_{[f_{j,1}, f_{j,2}]} g
  out.F_g = fd_lie_derivative(tab.g, tab.vf.f0, theta, gap);
  for (int j = 0; j < n; ++j) {
    Vec br = fd_bracket(tab.vf.f[2 * j], tab.vf.f[2 * j + 1], theta, gap);
    VectorField brf = [br](const Vec &) { return br; };
    out.F_g += fd_lie_derivative(tab.g, brf, theta, gap);
  }

  // R1 = sum L_{f_l} g U_l - sum L_{f_l2} L_{f_l1} g U_{l1,l2}
  for (int l = 0; l < L; ++l)
    out.R1 += tab.lvl1[l](theta) * bank.U(tab.vf.channels[l], t);
  for (int l1 = 0; l1 < L; ++l1)
    for (int l2 = 0; l2 < L; ++l2)
      out.R1 -= tab.lvl2[l1][l2](theta) *
                bank.iterated_U(tab.vf.channels[l1], tab.vf.channels[l2], t);

  // R2 = -sum L_{f0} L_{f_l} g U_l + sum L_{f0} L_{f_l2} L_{f_l1} g U_{l1,l2}
  //      + sum L_{f_l3} L_{f_l2} L_{f_l1} g U_{l1,l2} u_{l3}
  const double hc = fd_step_coarse(theta, gap);
  for (int l = 0; l < L; ++l)
    out.R2 -= fd_lie_derivative(tab.lvl1[l], tab.vf.f0, theta, gap, hc) *
              bank.U(tab.vf.channels[l], t);
  for (int l1 = 0; l1 < L; ++l1) {
    for (int l2 = 0; l2 < L; ++l2) {
      double uu = bank.iterated_U(tab.vf.channels[l1], tab.vf.channels[l2], t);
      out.R2 += fd_lie_derivative(tab.lvl2[l1][l2], tab.vf.f0, theta, gap, hc) * uu;
      for (int l3 = 0; l3 < L; ++l3)
        out.R2 += fd_lie_derivative(tab.lvl2[l1][l2], tab.vf.f[l3], theta, gap, hc) *
                  uu * bank.u(tab.vf.channels[l3], t);
    }
  }

  out.finite = std::isfinite(out.F_g) && std::isfinite(out.R1) && std::isfinite(out.R2);
  return out;
}

double lemma1_residual(const Trajectory &traj, const CostModel &cost,
                       const GeneratingPair &pair, const DitherBank &bank,
                       const PracticalSetSpec &spec, int which_g, double t1,
                       double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("lemma1_residual: need t1 < t2");
  std::size_t i1 = 0, i2 = 0;
  bool have1 = false;
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    if (!have1 && traj.t[k] >= t1 - 1e-12) {
      i1 = k;
      have1 = true;
    }
    if (traj.t[k] <= t2 + 1e-12) i2 = k;
  }
  if (!have1 || i2 <= i1 || i2 - i1 + 1 < 8)
    throw std::invalid_argument("lemma1_residual: trajectory too coarse on [t1, t2]");

  ScalarField g = make_g(spec, cost, which_g);

  const std::size_t count = i2 - i1 + 1;
  std::vector<double> integrand(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (long k = 0; k < static_cast<long>(count); ++k) {
    LemmaOneBreakdown b = lemma1_terms(cost, pair, bank, spec,
                                       traj.state[i1 + k], traj.t[i1 + k], which_g);
    integrand[k] = b.F_g + b.R2;
  }
  // Trapezoid over the recorded samples: the O(h^2) quadrature floor is the
  // dominant residual term for g2, so refining the trajectory visibly
  // shrinks the reported residual.
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    double dt = traj.t[i1 + k + 1] - traj.t[i1 + k];
    integral += 0.5 * dt * (integrand[k] + integrand[k + 1]);
  }

  LemmaOneBreakdown b1 = lemma1_terms(cost, pair, bank, spec, traj.state[i1], traj.t[i1], which_g);
  LemmaOneBreakdown b2 = lemma1_terms(cost, pair, bank, spec, traj.state[i2], traj.t[i2], which_g);

  double lhs = g(traj.state[i2]);
  double rhs = g(traj.state[i1]) + (b2.R1 - b1.R1) + integral;
  return std::abs(lhs - rhs);
}

std::vector<Vec> sample_delta_band(const PracticalSetSpec &spec,
                                   const CostModel &cost, int which, int count,
                                   std::uint64_t seed) {
  const int n = cost.dim();
  const double R = cost.domain_radius();
  const double p = a1_exponent(cost);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rand_x = [&]() {
    Vec x = cost.x_star();
    for (int i = 0; i < n; ++i) x[i] += R * (2.0 * unit(rng) - 1.0);
    return x;
  };
  std::vector<Vec> out;
  out.reserve(count);
  const long max_tries = 200L * count + 10000;
  for (long tries = 0; tries < max_tries && static_cast<int>(out.size()) < count;
       ++tries) {
    Vec x = rand_x();
    double jt = cost.eval_shifted(x);
    double jp = std::tanh(std::pow(std::max(jt, 0.0), p));
    if (which == 0) {
      if (jt > spec.J0) continue;
      double zmax = cost.j_star() + spec.z0;
      double jx = cost.eval(x);
      if (zmax <= jx) continue;
      double z = jx + unit(rng) * (zmax - jx);
      double y = z - jx;
      if (jp / y > spec.y0) continue;  // g3 > 0
      Vec theta = x;
      theta.push_back(z);
      out.push_back(std::move(theta));
    } else if (which == 1) {
      if (jt < spec.J0 || jt > spec.J0 + spec.epsilon) continue;
      double ymin = jp / (spec.y0 + spec.epsilon);
      double ymax = spec.z0 + spec.epsilon - jt;
      if (ymax <= ymin) continue;
      double y = ymin + unit(rng) * (ymax - ymin);
      Vec theta = x;
      theta.push_back(cost.eval(x) + y);
      out.push_back(std::move(theta));
    } else if (which == 2) {
      if (jt > spec.J0 + spec.epsilon) continue;
      double z = cost.j_star() + spec.z0 + unit(rng) * spec.epsilon;
      double y = z - cost.eval(x);
      if (!(y > 0)) continue;
      if (jp / y - spec.y0 > spec.epsilon) continue;
      Vec theta = x;
      theta.push_back(z);
      out.push_back(std::move(theta));
    } else if (which == 3) {
      // Keep a small floor on Jt so the nested difference quotients stay
      // well conditioned; the band is sampled away from the apex.
      if (jt < 1e-2 || jt > spec.J0 + spec.epsilon) continue;
      double v = unit(rng) * spec.epsilon;
      double y = jp / (spec.y0 + v);
      if (jt + y > spec.z0 + spec.epsilon) continue;  // g2 > eps
      Vec theta = x;
      theta.push_back(cost.eval(x) + y);
      out.push_back(std::move(theta));
    } else {
      throw std::invalid_argument("sample_delta_band: which must be 0..3");
    }
  }
  return out;
}

C2BoundReport sample_c2_bounds(const GeneratingPair &pair, const CostModel &cost,
                               const PracticalSetSpec &spec,
                               const DitherBank &bank, int samples_per_band,
                               std::uint64_t seed, bool parallel) {
  C2BoundReport report;
  report.valid = true;

  const int n = cost.dim();
  const int L = 2 * n;

  // Closed-form, omega-free amplitude constants of the dither integrals.
  std::vector<double> aU(L);
  std::vector<std::vector<double>> aUU(L, std::vector<double>(L));
  std::vector<double> amp_scaled(L);  // |u_l| / sqrt(omega)
  VectorFields vf0 = epigraph_fields(cost, pair);
  for (int l = 0; l < L; ++l) {
    aU[l] = bank.sup_U_scaled(vf0.channels[l]);
    amp_scaled[l] = 2.0 * std::sqrt(kPi * bank.multipliers()[vf0.channels[l].j]);
  }
  for (int l1 = 0; l1 < L; ++l1)
    for (int l2 = 0; l2 < L; ++l2)
      aUU[l1][l2] = bank.sup_iterated_U_scaled(vf0.channels[l1], vf0.channels[l2]);

  for (int gi = 1; gi <= 3; ++gi) {
    auto &slot = report.g[gi - 1];
    std::vector<Vec> band = sample_delta_band(spec, cost, gi, samples_per_band,
                                              seed + 17 * gi);
    slot.samples = static_cast<int>(band.size());
    if (band.empty()) {
      report.valid = false;
      report.note += "empty sample set for g" + std::to_string(gi) + "; ";
      continue;
    }

    std::vector<double> bvals(band.size());
    std::vector<double> c1vals(band.size(), 0.0), c2vals(band.size(), 0.0);
    const bool trivial = (gi == 2);  // f_lambda has no z-component: R-terms vanish

    LieTable tab = build_lie_table(cost, pair, spec, gi);
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (long k = 0; k < static_cast<long>(band.size()); ++k) {
      const Vec &theta = band[k];
      bvals[k] = -closed_form_Fg(spec, cost, theta, gi);
      if (trivial) continue;
      double gap = tab.gap(theta);
      double hc = fd_step_coarse(theta, gap);
      double c1 = 0.0, c2 = 0.0;
      for (int l = 0; l < L; ++l) {
        c1 += std::abs(tab.lvl1[l](theta)) * aU[l];
        c2 += std::abs(fd_lie_derivative(tab.lvl1[l], tab.vf.f0, theta, gap, hc)) *
              aU[l];
      }
      for (int l1 = 0; l1 < L; ++l1) {
        for (int l2 = 0; l2 < L; ++l2) {
          double ll = tab.lvl2[l1][l2](theta);
          c1 += std::abs(ll) * aUU[l1][l2];
          c2 += std::abs(fd_lie_derivative(tab.lvl2[l1][l2], tab.vf.f0, theta, gap,
                                           hc)) *
                aUU[l1][l2];
          for (int l3 = 0; l3 < L; ++l3)
            c2 += std::abs(fd_lie_derivative(tab.lvl2[l1][l2], tab.vf.f[l3], theta,
                                             gap, hc)) *
                  aUU[l1][l2] * amp_scaled[l3];
        }
      }
      c1vals[k] = c1;
      c2vals[k] = c2;
    }

    double b = bvals[0], c1 = 0.0, c2 = 0.0;
    bool finite = true;
    for (std::size_t k = 0; k < band.size(); ++k) {
      finite = finite && std::isfinite(bvals[k]) && std::isfinite(c1vals[k]) &&
               std::isfinite(c2vals[k]);
      b = std::min(b, bvals[k]);
      c1 = std::max(c1, c1vals[k]);
      c2 = std::max(c2, c2vals[k]);
    }
    if (!finite) {
      report.valid = false;
      report.note += "non-finite Lie derivative for g" + std::to_string(gi) + "; ";
    }
    slot.b = b;
    slot.c1 = c1;
    slot.c2 = c2;
  }
  return report;
}

double estimate_omega_star(const C2BoundReport &report, double delta) {
  if (!report.valid)
    throw std::invalid_argument("estimate_omega_star: invalid bound report");
  if (delta <= 0) throw std::invalid_argument("estimate_omega_star: delta must be positive");
  double w = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto &g = report.g[i];
    if (g.c1 == 0.0 && g.c2 == 0.0) continue;  // R-terms vanish identically
    if (g.b <= 0)
      throw std::domain_error("estimate_omega_star: nonpositive b, hypotheses unmet");
    double t1 = 2.0 * g.c1 / delta;
    double t2 = g.c2 / g.b;
    w = std::max(w, std::max(t1 * t1, t2 * t2));
  }
  return w;
}

std::vector<std::pair<double, double>> control_envelope(const Trajectory &traj,
                                                        double window) {
  if (traj.t.size() < 2)
    throw std::invalid_argument("control_envelope: trajectory too short");
  double dt_med = (traj.t.back() - traj.t.front()) / (traj.t.size() - 1);
  if (window < 2 * dt_med)
    throw std::invalid_argument("control_envelope: window shorter than 2 samples");

  std::vector<double> mag(traj.t.size());
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    double m = 0;
    for (double u : traj.control[k]) m = std::max(m, std::abs(u));
    mag[k] = m;
  }
  std::vector<std::pair<double, double>> env(traj.t.size());
  std::deque<std::size_t> dq;  // indices with decreasing mag
  std::size_t lo = 0;
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    while (!dq.empty() && mag[dq.back()] <= mag[k]) dq.pop_back();
    dq.push_back(k);
    while (traj.t[dq.front()] < traj.t[k] - window) dq.pop_front();
    while (traj.t[lo] < traj.t[k] - window) ++lo;
    env[k] = {traj.t[k], mag[dq.front()]};
  }
  return env;
}

double envelope_at(const std::vector<std::pair<double, double>> &env, double t) {
  double val = env.front().second;
  for (const auto &e : env) {
    if (e.first > t) break;
    val = e.second;
  }
  return val;
}

ConvergenceReport convergence_report(const Trajectory &traj, const CostModel &cost,
                                     int n_x, bool has_z,
                                     const PracticalSetSpec *spec) {
  ConvergenceReport rep;
  rep.truncated = traj.truncated;
  rep.abort_reason = traj.abort_reason;
  if (traj.t.empty()) return rep;

  const Vec &last = traj.state.back();
  Vec x_last(last.begin(), last.begin() + n_x);
  Vec dx(n_x);
  for (int i = 0; i < n_x; ++i) dx[i] = x_last[i] - cost.x_star()[i];
  rep.final_x_err = norm(dx);
  if (has_z) rep.final_z_err = last[n_x] - cost.j_star();

  if (has_z) {
    double zt0 = traj.state.front()[n_x] - cost.j_star();
    double t0 = traj.t.front();
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
      double z = traj.state[k][n_x];
      if (k > 0 && z >= traj.state[k - 1][n_x] + 1e-10) ++rep.monotonicity_violations;
      double floor = 0.999 * zt0 * std::exp(-(traj.t[k] - t0));
      if (z - cost.j_star() < floor) ++rep.floor_violations;
      if (spec) {
        Vec x(traj.state[k].begin(), traj.state[k].begin() + n_x);
        double y = z - cost.eval(x);
        if (!(y > 0)) {
          ++rep.delta_exit_events;
          continue;
        }
        Vec theta = x;
        theta.push_back(z);
        auto g = eval_g(*spec, cost, theta);
        if (std::max({g[0], g[1], g[2]}) > spec->epsilon + 1e-6)
          ++rep.delta_exit_events;
      }
    }
  }
  return rep;
}

}  // namespace esclab
