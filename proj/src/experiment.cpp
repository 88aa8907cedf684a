#include "esclab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace esclab {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

IntegrateOptions options_for(const ExperimentConfig &cfg, const OdeSystem &sys) {
  IntegrateOptions opts;
  opts.steps_per_fastest_period = cfg.steps_per_period;
  double h = sys.fastest_period / cfg.steps_per_period;
  double total = cfg.t_end / h;
  opts.record_stride = std::max(1, static_cast<int>(std::ceil(total / 2e5)));
  return opts;
}

}  // namespace

PreparedExperiment prepare(const ExperimentConfig &cfg) {
  auto errs = cfg.validate();
  if (!errs.empty()) {
    std::string msg = "config invalid:";
    for (const auto &e : errs) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  CostModel cost = make_cost(cfg.cost_name, cfg.cost_params);
  auto est = estimate_a1_constants(cost, cfg.a1_m, a1_grid(cost));
  if (est.feasible) cost.set_a1(est.cert);

  GeneratingPair pair = make_pair(cfg.pair_family, cfg.pair_param);
  DitherBank bank(cfg.omega, cfg.multipliers);

  double delta = cfg.delta_auto ? cfg.epsilon / 2 : cfg.delta;
  PracticalSetSpec set = [&] {
    if (cfg.y0_auto) {
      if (!cost.a1())
        throw std::invalid_argument(
            "prepare: y0 = auto requires a feasible A1 certificate");
      double y0 = PracticalSetSpec::y0_lower_bound(cost.a1()->kappa, cfg.epsilon) + 1e-3;
      return PracticalSetSpec::make(cfg.J0, cfg.z0, y0, cfg.epsilon, delta, cost);
    }
    return PracticalSetSpec::make(cfg.J0, cfg.z0, cfg.y0, cfg.epsilon, delta, cost);
  }();
  return PreparedExperiment{std::move(cost), std::move(pair), std::move(bank), set};
}

SystemRun run_system(const PreparedExperiment &prep, const ExperimentConfig &cfg,
                     const std::string &system) {
  SystemRun run;
  run.system = system;
  run.n_x = prep.cost.dim();
  try {
    OdeSystem sys;
    Vec s0 = cfg.x0;
    if (system == "proposed") {
      sys = make_proposed(prep.cost, prep.pair, prep.bank);
      s0.push_back(cfg.z0_init);
      run.has_z = true;
    } else if (system == "lie_approx") {
      sys = make_lie_approx(prep.cost);
      sys.fastest_period = prep.bank.fastest_period();
      s0.push_back(cfg.z0_init);
      run.has_z = true;
    } else if (system == "grushkovskaya") {
      sys = make_grushkovskaya(prep.cost, prep.pair, prep.bank,
                               cfg.grushkovskaya_offset);
    } else if (system == "suttner") {
      sys = make_suttner(prep.cost);
      sys.fastest_period = prep.bank.fastest_period();
      s0.push_back(cfg.z0_init);
      s0.push_back(cfg.omega0_init);
      run.has_z = true;
      run.has_omega_phase = true;
    } else {
      throw std::invalid_argument("unknown system '" + system + "'");
    }
    run.traj = integrate(sys, s0, cfg.t_end, options_for(cfg, sys));
    run.ok = true;
  } catch (const std::exception &e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

std::string output_dir_for(const ExperimentConfig &cfg) {
  const char *env = std::getenv("ESC_LAB_OUT");
  return (env && *env) ? std::string(env) : cfg.output_dir;
}

void write_trajectory_csv(const std::string &path, const SystemRun &run,
                          const CostModel &cost, const PracticalSetSpec &set,
                          std::size_t max_rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  const int n = run.n_x;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  if (run.has_z) out << ",z";
  if (run.has_omega_phase) out << ",Omega";
  for (int i = 1; i <= n; ++i) out << ",u_" << i;
  if (run.has_z) out << ",g1,g2,g3,y";
  out << "\n";

  const std::size_t total = run.traj.t.size();
  const std::size_t stride = std::max<std::size_t>(1, (total + max_rows - 1) / max_rows);
  for (std::size_t k = 0; k < total; k += stride) {
    const Vec &s = run.traj.state[k];
    out << fmt17(run.traj.t[k]);
    for (int i = 0; i < n; ++i) out << "," << fmt17(s[i]);
    if (run.has_z) out << "," << fmt17(s[n]);
    if (run.has_omega_phase) out << "," << fmt17(s[n + 1]);
    for (int i = 0; i < n; ++i) out << "," << fmt17(run.traj.control[k][i]);
    if (run.has_z) {
      Vec x(s.begin(), s.begin() + n);
      double y = s[n] - cost.eval(x);
      if (y > 0) {
        Vec theta = x;
        theta.push_back(s[n]);
        auto g = eval_g(set, cost, theta);
        out << "," << fmt17(g[0]) << "," << fmt17(g[1]) << "," << fmt17(g[2])
            << "," << fmt17(y);
      } else {
        out << ",nan,nan,nan," << fmt17(y);
      }
    }
    out << "\n";
  }
}

int run_experiment(const ExperimentConfig &cfg) {
  PreparedExperiment prep = prepare(cfg);
  std::string dir = output_dir_for(cfg);
  std::filesystem::create_directories(dir);

  std::vector<SystemRun> runs(cfg.systems.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(cfg.systems.size()); ++i)
    runs[i] = run_system(prep, cfg, cfg.systems[i]);

  bool any_abort = false;
  std::ofstream summary(dir + "/summary.txt");
  for (const auto &run : runs) {
    if (run.ok)
      write_trajectory_csv(dir + "/" + run.system + ".csv", run, prep.cost, prep.set);
    summary << "system: " << run.system << "\n";
    if (!run.ok) {
      summary << "  error: " << run.error << "\n";
      any_abort = true;
      continue;
    }
    ConvergenceReport rep =
        convergence_report(run.traj, prep.cost, run.n_x, run.has_z, &prep.set);
    summary << "  samples: " << run.traj.t.size()
            << "  rhs_evals: " << run.traj.rhs_evals << "\n";
    summary << "  final_x_err: " << fmt17(rep.final_x_err) << "\n";
    if (run.has_z) summary << "  final_z_err: " << fmt17(rep.final_z_err) << "\n";
    if (run.has_z)
      summary << "  z_monotonicity_violations: " << rep.monotonicity_violations
              << "\n  exp_floor_violations: " << rep.floor_violations
              << "\n  delta_eps_exits: " << rep.delta_exit_events << "\n";
    if (run.traj.truncated) {
      summary << "  truncated: " << run.traj.abort_reason << "\n";
      any_abort = true;
    }
  }
  return any_abort ? 2 : 0;
}

std::vector<SweepRow> sweep_omega(const ExperimentConfig &cfg,
                                  const std::vector<double> &omegas,
                                  bool parallel) {
  if (omegas.size() < 2)
    throw std::invalid_argument("sweep_omega: need at least 2 omegas");
  PreparedExperiment base = prepare(cfg);
  std::vector<SweepRow> rows(omegas.size());

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long i = 0; i < static_cast<long>(omegas.size()); ++i) {
    ExperimentConfig c = cfg;
    c.omega = omegas[i];
    DitherBank bank(c.omega, c.multipliers);
    PreparedExperiment prep{base.cost, base.pair, bank, base.set};

    SweepRow row;
    row.omega = omegas[i];
    SystemRun prop = run_system(prep, c, "proposed");
    SystemRun avg = run_system(prep, c, "lie_approx");
    row.truncated = !prop.ok || prop.traj.truncated;
    if (prop.ok && avg.ok) {
      std::size_t count = std::min(prop.traj.t.size(), avg.traj.t.size());
      double sup = 0;
      for (std::size_t k = 0; k < count; ++k) {
        for (int d = 0; d < prep.cost.dim(); ++d)
          sup = std::max(sup,
                         std::abs(prop.traj.state[k][d] - avg.traj.state[k][d]));
      }
      row.sup_deviation = sup;
      double gmax = -1e300;
      for (std::size_t k = 0; k < prop.traj.t.size(); ++k) {
        const Vec &s = prop.traj.state[k];
        Vec x(s.begin(), s.begin() + prep.cost.dim());
        double y = s[prep.cost.dim()] - prep.cost.eval(x);
        if (!(y > 0)) continue;
        auto g = eval_g(prep.set, prep.cost, s);
        gmax = std::max(gmax, std::max({g[0], g[1], g[2]}));
      }
      row.max_g_excursion = gmax;
      ConvergenceReport rep =
          convergence_report(prop.traj, prep.cost, prep.cost.dim(), true, &prep.set);
      row.final_x_err = rep.final_x_err;
      row.final_z_err = rep.final_z_err;
    }
    rows[i] = row;
  }
  return rows;
}

int run_sweep(const ExperimentConfig &cfg, const std::vector<double> &omegas) {
  auto rows = sweep_omega(cfg, omegas);
  std::string dir = output_dir_for(cfg);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/sweep.csv");
  out << "omega,sup_deviation,max_g_excursion,final_x_err,final_z_err,truncated\n";
  bool any_abort = false;
  for (const auto &r : rows) {
    out << fmt17(r.omega) << "," << fmt17(r.sup_deviation) << ","
        << fmt17(r.max_g_excursion) << "," << fmt17(r.final_x_err) << ","
        << fmt17(r.final_z_err) << "," << (r.truncated ? 1 : 0) << "\n";
    any_abort = any_abort || r.truncated;
  }
  return any_abort ? 2 : 0;
}

ConditionReport validate_conditions(const ExperimentConfig &cfg) {
  ConditionReport rep;
  std::ostringstream txt;

  CostModel cost = make_cost(cfg.cost_name, cfg.cost_params);
  GeneratingPair pair = make_pair(cfg.pair_family, cfg.pair_param);
  DitherBank bank(cfg.omega, cfg.multipliers);

  // Condition C1: Wronskian identity plus vanishing at zero.
  auto grid = log_grid(1e-3, 10.0, 400);
  rep.wronskian_residual = check_c1_wronskian(pair, grid);
  bool vanishes = true;
  for (double y : {1e-2, 1e-4, 1e-6}) {
    if (std::abs(pair.f1(y)) > 0.5 || std::abs(pair.f2(y)) > 0.5) vanishes = false;
  }
  rep.pair_c1_flagged = pair.c1_flagged;
  rep.wronskian_pass = rep.wronskian_residual <= 1e-8 && vanishes && pair.c1_flagged;
  txt << "C1 (Wronskian == 1, F(0) = 0): "
      << (rep.wronskian_pass ? "PASS" : "FAIL")
      << "  max residual = " << rep.wronskian_residual
      << (vanishes ? "" : "  [does not vanish at 0]") << "\n";

  // Assumption A1.
  rep.a1 = estimate_a1_constants(cost, cfg.a1_m, a1_grid(cost));
  bool a1_pass = rep.a1.feasible && !rep.a1.degenerate;
  txt << "A1 (gradient power sandwich, m = " << cfg.a1_m
      << "): " << (a1_pass ? "PASS" : "FAIL");
  if (rep.a1.feasible)
    txt << "  kappa = " << rep.a1.cert.kappa << "  gamma = " << rep.a1.cert.gamma;
  if (!rep.a1.note.empty()) txt << "  [" << rep.a1.note << "]";
  txt << "\n";

  double omega_star = -1;
  bool c2_pass = false;
  if (a1_pass && rep.wronskian_pass) {
    CostModel c2cost = cost;
    c2cost.set_a1(rep.a1.cert);
    double delta = cfg.delta_auto ? cfg.epsilon / 2 : cfg.delta;
    rep.y0_bound = PracticalSetSpec::y0_lower_bound(rep.a1.cert.kappa, cfg.epsilon);
    rep.y0_used = cfg.y0_auto ? rep.y0_bound + 1e-3 : cfg.y0;
    PracticalSetSpec set = PracticalSetSpec::make(cfg.J0, cfg.z0, rep.y0_used,
                                                 cfg.epsilon, delta, c2cost);
    rep.c2 = sample_c2_bounds(pair, c2cost, set, bank, 300, cfg.seed);
    c2_pass = rep.c2.valid;
    for (int i = 0; i < 3; ++i)
      c2_pass = c2_pass && rep.c2.g[i].b > 0;
    txt << "C2 (sampled bound constants):\n";
    for (int i = 0; i < 3; ++i)
      txt << "  g" << (i + 1) << ": c1 = " << rep.c2.g[i].c1
          << "  c2 = " << rep.c2.g[i].c2 << "  b = " << rep.c2.g[i].b
          << "  (" << rep.c2.g[i].samples << " samples)\n";
    txt << "C2 overall: " << (c2_pass ? "PASS" : "FAIL");
    if (!rep.c2.note.empty()) txt << "  [" << rep.c2.note << "]";
    txt << "\n";
    if (c2_pass) {
      omega_star = estimate_omega_star(rep.c2, delta);
      txt << "omega* = " << omega_star << "  (delta = " << delta << ")\n";
    }
    txt << "y0 lower bound = " << rep.y0_bound << "  y0 used = " << rep.y0_used
        << "\n";
  } else {
    txt << "C2: skipped (prerequisite FAIL)\n";
  }
  rep.omega_star = omega_star;
  rep.pass = rep.wronskian_pass && a1_pass && c2_pass;
  txt << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  rep.text = txt.str();
  return rep;
}

}  // namespace esclab
