// Timing comparison between the OpenMP kernels and their serial reference
// implementations: A1 grid estimation, C2 band sampling, omega sweep.
#include <chrono>
#include <cstdio>

#include "esclab/experiment.hpp"

using namespace esclab;
using clk = std::chrono::steady_clock;

static double ms_since(clk::time_point t0) {
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

int main() {
  CostModel cost = make_cost("quadratic_shifted", {{"center", 1}, {"curvature", 1},
                                                   {"offset", 2020}, {"radius", 4}});
  auto grid = a1_grid(cost, 200000);

  auto t0 = clk::now();
  auto serial = estimate_a1_constants_serial(cost, 1.0, grid);
  double t_serial = ms_since(t0);
  t0 = clk::now();
  auto parallel = estimate_a1_constants(cost, 1.0, grid);
  double t_parallel = ms_since(t0);
  std::printf("a1_estimate   serial %8.2f ms   parallel %8.2f ms   speedup %.2fx  (match: %s)\n",
              t_serial, t_parallel, t_serial / t_parallel,
              serial.cert.kappa == parallel.cert.kappa ? "yes" : "NO");

  cost.set_a1(parallel.cert);
  GeneratingPair pair = make_pair("suttner_dashkovskiy");
  DitherBank bank(2.0, {1});
  PracticalSetSpec set = PracticalSetSpec::make_auto_y0(3.0, 5.0, 0.5, cost);

  t0 = clk::now();
  auto c2s = sample_c2_bounds(pair, cost, set, bank, 400, 1, false);
  double c2_serial = ms_since(t0);
  t0 = clk::now();
  auto c2p = sample_c2_bounds(pair, cost, set, bank, 400, 1, true);
  double c2_parallel = ms_since(t0);
  std::printf("c2_bounds     serial %8.2f ms   parallel %8.2f ms   speedup %.2fx  (match: %s)\n",
              c2_serial, c2_parallel, c2_serial / c2_parallel,
              c2s.g[0].c1 == c2p.g[0].c1 && c2s.g[2].c2 == c2p.g[2].c2 ? "yes" : "NO");

  ExperimentConfig cfg;
  cfg.cost_name = "quadratic_shifted";
  cfg.cost_params = {{"center", 1}, {"curvature", 1}, {"offset", 2020}, {"radius", 4}};
  cfg.pair_family = "suttner_dashkovskiy";
  cfg.multipliers = {1};
  cfg.x0 = {3.0};
  cfg.z0_init = 2024.0;
  cfg.J0 = 3.0;
  cfg.z0 = 5.0;
  cfg.epsilon = 0.5;
  cfg.t_end = 5.0;
  cfg.systems = {"proposed"};
  std::vector<double> omegas{25, 50, 100, 200, 400};

  t0 = clk::now();
  auto rows_s = sweep_omega(cfg, omegas, false);
  double sweep_serial = ms_since(t0);
  t0 = clk::now();
  auto rows_p = sweep_omega(cfg, omegas, true);
  double sweep_parallel = ms_since(t0);
  std::printf("omega_sweep   serial %8.2f ms   parallel %8.2f ms   speedup %.2fx  (match: %s)\n",
              sweep_serial, sweep_parallel, sweep_serial / sweep_parallel,
              rows_s.back().sup_deviation == rows_p.back().sup_deviation ? "yes" : "NO");
  return 0;
}
