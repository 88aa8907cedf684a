#include "esclab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace esclab {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

bool all_finite(const Vec &v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

Trajectory integrate(const OdeSystem &sys, const Vec &s0, double t_end,
                     const IntegrateOptions &opts, const StepObserver &observer) {
  if (opts.steps_per_fastest_period < 32)
    throw std::invalid_argument("integrate: steps_per_fastest_period must be >= 32");
  if (t_end <= 0) throw std::invalid_argument("integrate: t_end must be positive");
  if (static_cast<int>(s0.size()) != sys.state_dim)
    throw std::invalid_argument("integrate: state dimension mismatch");
  if (sys.in_domain && !sys.in_domain(s0))
    throw std::invalid_argument("integrate: initial state violates the domain invariant");

  const double h_base = sys.fastest_period / opts.steps_per_fastest_period;
  const double phase_budget = kTwoPi / opts.steps_per_fastest_period;

  Trajectory traj;
  traj.record_stride = opts.record_stride;

  Vec s = s0;
  Vec ds(sys.state_dim), u(sys.control_dim);
  Vec k1(sys.state_dim), k2(sys.state_dim), k3(sys.state_dim), k4(sys.state_dim);
  Vec tmp(sys.state_dim);
  Vec u_scratch(sys.control_dim);

  double t = 0.0;
  std::size_t step = 0;

  auto record = [&](double tt, const Vec &ss, const Vec &uu) {
    traj.t.push_back(tt);
    traj.state.push_back(ss);
    traj.control.push_back(uu);
  };

  while (t < t_end - 1e-15 * t_end) {
    double h = std::min(h_base, t_end - t);
    if (sys.phase_rate) {
      double rate = sys.phase_rate(s);
      if (rate > 0) h = std::min(h, phase_budget / rate);
    }
    if (h < opts.min_step) {
      traj.truncated = true;
      traj.abort_reason = "phase-step underflow";
      break;
    }
    if (step >= opts.max_steps) {
      traj.truncated = true;
      traj.abort_reason = "step budget exhausted";
      break;
    }

    bool ok = sys.rhs(t, s, k1, u);
    ++traj.rhs_evals;
    if (!ok) {
      traj.truncated = true;
      traj.abort_reason = "domain violation";
      break;
    }
    if (step % static_cast<std::size_t>(opts.record_stride) == 0) record(t, s, u);
    if (observer) observer(t, s, u);

    for (int i = 0; i < sys.state_dim; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    ok = sys.rhs(t + 0.5 * h, tmp, k2, u_scratch);
    ++traj.rhs_evals;
    if (ok) {
      for (int i = 0; i < sys.state_dim; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
      ok = sys.rhs(t + 0.5 * h, tmp, k3, u_scratch);
      ++traj.rhs_evals;
    }
    if (ok) {
      for (int i = 0; i < sys.state_dim; ++i) tmp[i] = s[i] + h * k3[i];
      ok = sys.rhs(t + h, tmp, k4, u_scratch);
      ++traj.rhs_evals;
    }
    if (!ok) {
      traj.truncated = true;
      traj.abort_reason = "domain violation";
      break;
    }

    for (int i = 0; i < sys.state_dim; ++i)
      s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t += h;
    ++step;

    if (!all_finite(s)) {
      traj.truncated = true;
      traj.abort_reason = "non-finite state";
      break;
    }
    if (sys.in_domain && !sys.in_domain(s)) {
      traj.truncated = true;
      traj.abort_reason = "domain violation";
      break;
    }
  }

  if (!traj.truncated) {
    // Final sample at t_end.
    if (sys.rhs(t, s, ds, u)) {
      ++traj.rhs_evals;
      record(t, s, u);
      if (observer) observer(t, s, u);
    }
  }
  return traj;
}

OdeSystem make_proposed(const CostModel &cost, const GeneratingPair &pair,
                        const DitherBank &bank) {
  if (!pair.c1_flagged)
    throw std::invalid_argument(
        "make_proposed: pair '" + pair.family_tag + "' is not C1-admissible");
  if (bank.channels() != cost.dim())
    throw std::invalid_argument("make_proposed: bank channel count != cost dim");
  const int n = cost.dim();
  OdeSystem sys;
  sys.state_dim = n + 1;
  sys.control_dim = n;
  sys.fastest_period = bank.fastest_period();
  sys.rhs = [cost, pair, bank, n](double t, const Vec &s, Vec &ds, Vec &u) {
    Vec x(s.begin(), s.begin() + n);
    double y = s[n] - cost.eval(x);
    if (!(y > 0)) return false;
    double F1 = pair.f1(y), F2 = pair.f2(y);
    for (int j = 0; j < n; ++j) {
      double uj = F1 * bank.u({j, 1}, t) + F2 * bank.u({j, 2}, t);
      ds[j] = uj;
      u[j] = uj;
    }
    ds[n] = -y;
    return true;
  };
  sys.in_domain = [cost, n](const Vec &s) {
    Vec x(s.begin(), s.begin() + n);
    return s[n] - cost.eval(x) > 0;
  };
  return sys;
}

OdeSystem make_lie_approx(const CostModel &cost) {
  const int n = cost.dim();
  OdeSystem sys;
  sys.state_dim = n + 1;
  sys.control_dim = n;
  sys.fastest_period = 1.0;
  sys.rhs = [cost, n](double, const Vec &s, Vec &ds, Vec &u) {
    Vec x(s.begin(), s.begin() + n);
    Vec g = cost.grad(x);
    for (int j = 0; j < n; ++j) {
      ds[j] = -g[j];
      u[j] = -g[j];
    }
    ds[n] = -s[n] + cost.eval(x);
    return true;
  };
  return sys;
}

OdeSystem make_grushkovskaya(const CostModel &cost, const GeneratingPair &pair,
                             const DitherBank &bank, double offset) {
  if (bank.channels() != cost.dim())
    throw std::invalid_argument("make_grushkovskaya: bank channel count != cost dim");
  const int n = cost.dim();
  OdeSystem sys;
  sys.state_dim = n;
  sys.control_dim = n;
  sys.fastest_period = bank.fastest_period();
  sys.rhs = [cost, pair, bank, offset, n](double t, const Vec &s, Vec &ds, Vec &u) {
    double y = cost.eval(s) - offset;
    if (!(y > 0)) return false;
    double F1 = pair.f1(y), F2 = pair.f2(y);
    for (int j = 0; j < n; ++j) {
      double uj = -F1 * bank.u({j, 1}, t) + F2 * bank.u({j, 2}, t);
      ds[j] = uj;
      u[j] = uj;
    }
    return true;
  };
  sys.in_domain = [cost, offset](const Vec &s) { return cost.eval(s) - offset > 0; };
  return sys;
}

OdeSystem make_suttner(const CostModel &cost) {
  const int n = cost.dim();
  OdeSystem sys;
  sys.state_dim = n + 2;  // (x, z, Omega)
  sys.control_dim = n;
  sys.fastest_period = 1.0;
  sys.rhs = [cost, n](double, const Vec &s, Vec &ds, Vec &u) {
    Vec x(s.begin(), s.begin() + n);
    double y = s[n] - cost.eval(x);
    if (!(y > 0)) return false;
    double phase = s[n + 1] + 1.0 / y;
    double mag = 1.0 / (y * y);
    for (int j = 0; j < n; ++j) {
      double uj = mag * std::sin(phase);
      ds[j] = uj;
      u[j] = uj;
    }
    ds[n] = -y;
    ds[n + 1] = 1.0 / (y * y * y * y * y);
    return true;
  };
  sys.in_domain = [cost, n](const Vec &s) {
    Vec x(s.begin(), s.begin() + n);
    return s[n] - cost.eval(x) > 0;
  };
  sys.phase_rate = [cost, n](const Vec &s) {
    Vec x(s.begin(), s.begin() + n);
    double y = s[n] - cost.eval(x);
    return y > 0 ? 1.0 / (y * y * y * y * y) : 1e300;
  };
  return sys;
}

}  // namespace esclab
