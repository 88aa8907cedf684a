#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "esclab/experiment.hpp"

using namespace esclab;
namespace fs = std::filesystem;

namespace {

const char *kExampleCfg = R"(# flagship quadratic experiment
cost.name = quadratic_shifted
cost.center = 1
cost.curvature = 1
cost.offset = 2020
cost.radius = 4
pair.family = suttner_dashkovskiy
dither.omega = 2
dither.multipliers = 1
init.x = 3
init.z = 2024
init.Omega = 2
set.J0 = 3
set.z0 = 5
set.epsilon = 0.5
set.y0 = auto
systems = proposed, lie_approx
integration.t_end = 2
)";

ExperimentConfig example_cfg() { return ExperimentConfig::parse_text(kExampleCfg); }

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string &path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("flat key-value parsing") {
  auto kv = parse_flat_kv("a.b = 1  # comment\n\n# full comment\n c = x y \n");
  CHECK(kv.size() == 2);
  CHECK(kv["a.b"] == "1");
  CHECK(kv["c"] == "x y");
  CHECK_THROWS(parse_flat_kv("no equals sign here"));
}

TEST_CASE("config parsing, defaults and unknown keys") {
  ExperimentConfig cfg = example_cfg();
  CHECK(cfg.cost_name == "quadratic_shifted");
  CHECK(cfg.cost_params.at("offset") == doctest::Approx(2020.0));
  CHECK(cfg.omega == doctest::Approx(2.0));
  CHECK(cfg.multipliers == std::vector<int>{1});
  CHECK(cfg.x0 == Vec{3.0});
  CHECK(cfg.z0_init == doctest::Approx(2024.0));
  CHECK(cfg.y0_auto);
  CHECK(cfg.delta_auto);
  CHECK(cfg.systems == std::vector<std::string>{"proposed", "lie_approx"});
  CHECK(cfg.t_end == doctest::Approx(2.0));
  CHECK(cfg.steps_per_period == 64);  // default
  CHECK(cfg.grushkovskaya_offset == doctest::Approx(2019.0));

  CHECK_THROWS(ExperimentConfig::parse_text("bogus.key = 1\n"));
  ExperimentConfig manual = ExperimentConfig::parse_text("set.y0 = 1.25\nset.delta = 0.1\n");
  CHECK_FALSE(manual.y0_auto);
  CHECK(manual.y0 == doctest::Approx(1.25));
  CHECK_FALSE(manual.delta_auto);
  CHECK(manual.delta == doctest::Approx(0.1));
  CHECK_THROWS(ExperimentConfig::parse_file("/no/such/config/file.cfg"));
}

TEST_CASE("config validation collects violations") {
  ExperimentConfig cfg = example_cfg();
  CHECK(cfg.validate().empty());

  ExperimentConfig bad = cfg;
  bad.systems.clear();
  auto errs = bad.validate();
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("systems") != std::string::npos);

  bad = cfg;
  bad.systems = {"proposed", "unknown_one"};
  CHECK_FALSE(bad.validate().empty());

  bad = cfg;
  bad.z0_init = 2021.0;  // below J(3) = 2022
  CHECK_FALSE(bad.validate().empty());

  bad = cfg;
  bad.multipliers = {1, 2};  // count != dim
  CHECK_FALSE(bad.validate().empty());

  bad = cfg;
  bad.steps_per_period = 16;
  CHECK_FALSE(bad.validate().empty());

  bad = cfg;
  bad.delta_auto = false;
  bad.delta = 0.5;  // not < epsilon
  CHECK_FALSE(bad.validate().empty());

  // errors accumulate rather than stopping at the first
  bad = cfg;
  bad.systems.clear();
  bad.t_end = -1.0;
  CHECK(bad.validate().size() == 2);
}

TEST_CASE("prepare resolves the auto constants") {
  PreparedExperiment prep = prepare(example_cfg());
  REQUIRE(prep.cost.a1().has_value());
  CHECK(prep.cost.a1()->kappa == doctest::Approx(2.0).epsilon(1e-6));
  // kappa = 2, eps = 0.5: lower bound 1, margin 1e-3
  CHECK(prep.set.y0 == doctest::Approx(1.001).epsilon(1e-6));
  CHECK(prep.set.delta == doctest::Approx(0.25));

  ExperimentConfig broken = example_cfg();
  broken.systems.clear();
  CHECK_THROWS(prepare(broken));
}

TEST_CASE("run_experiment writes CSVs deterministically") {
  ExperimentConfig cfg = example_cfg();
  cfg.systems = {"proposed", "lie_approx", "grushkovskaya", "suttner"};
  TempDir a("esclab_test_run_a"), b("esclab_test_run_b");

  cfg.output_dir = a.path.string();
  CHECK(run_experiment(cfg) == 0);
  cfg.output_dir = b.path.string();
  CHECK(run_experiment(cfg) == 0);

  for (const char *f : {"proposed.csv", "lie_approx.csv", "grushkovskaya.csv",
                        "suttner.csv", "summary.txt"}) {
    CHECK(slurp((a.path / f).string()) == slurp((b.path / f).string()));
  }
  CHECK(first_line((a.path / "proposed.csv").string()) ==
        "t,x_1,z,u_1,g1,g2,g3,y");
  CHECK(first_line((a.path / "grushkovskaya.csv").string()) == "t,x_1,u_1");
  CHECK(first_line((a.path / "suttner.csv").string()) ==
        "t,x_1,z,Omega,u_1,g1,g2,g3,y");
  // 17-significant-digit floats: the initial z is exact
  std::ifstream in((a.path / "proposed.csv").string());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.substr(0, 7) == "0,3,202");
}

TEST_CASE("one failing system does not poison its siblings") {
  ExperimentConfig cfg = example_cfg();
  cfg.systems = {"proposed", "grushkovskaya"};
  cfg.grushkovskaya_offset = 2030.0;  // J(x0) - offset < 0: aborts immediately
  TempDir d("esclab_test_partial");
  cfg.output_dir = d.path.string();
  CHECK(run_experiment(cfg) == 2);
  CHECK(fs::exists(d.path / "proposed.csv"));
  CHECK_FALSE(fs::exists(d.path / "grushkovskaya.csv"));
  std::string summary = slurp((d.path / "summary.txt").string());
  CHECK(summary.find("error") != std::string::npos);
  CHECK(summary.find("final_x_err") != std::string::npos);
}

TEST_CASE("ESC_LAB_OUT overrides the configured output directory") {
  ExperimentConfig cfg = example_cfg();
  cfg.output_dir = "should_not_be_used";
  TempDir d("esclab_test_env");
  setenv("ESC_LAB_OUT", d.path.c_str(), 1);
  CHECK(output_dir_for(cfg) == d.path.string());
  CHECK(run_experiment(cfg) == 0);
  unsetenv("ESC_LAB_OUT");
  CHECK(fs::exists(d.path / "proposed.csv"));
  CHECK_FALSE(fs::exists("should_not_be_used"));
  CHECK(output_dir_for(cfg) == "should_not_be_used");
}

TEST_CASE("control laws never read the minimizer metadata") {
  ExperimentConfig cfg = example_cfg();
  PreparedExperiment prep = prepare(cfg);
  PreparedExperiment poisoned{prep.cost.with_poisoned_metadata(), prep.pair,
                              prep.bank, prep.set};
  for (const char *system : {"proposed", "lie_approx", "grushkovskaya", "suttner"}) {
    SystemRun clean = run_system(prep, cfg, system);
    SystemRun dirty = run_system(poisoned, cfg, system);
    REQUIRE(clean.ok);
    REQUIRE(dirty.ok);
    CHECK(clean.traj.t == dirty.traj.t);
    CHECK(clean.traj.state == dirty.traj.state);
    CHECK(clean.traj.control == dirty.traj.control);
  }
}

TEST_CASE("omega sweep produces its CSV") {
  ExperimentConfig cfg = example_cfg();
  cfg.t_end = 2.0;
  TempDir d("esclab_test_sweep");
  cfg.output_dir = d.path.string();
  CHECK_THROWS(sweep_omega(cfg, {25.0}));
  CHECK(run_sweep(cfg, {25.0, 50.0}) == 0);
  CHECK(first_line((d.path / "sweep.csv").string()) ==
        "omega,sup_deviation,max_g_excursion,final_x_err,final_z_err,truncated");
  auto rows = sweep_omega(cfg, {25.0, 50.0}, false);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].sup_deviation > rows[1].sup_deviation);
  CHECK_FALSE(rows[0].truncated);
}

TEST_CASE("validate_conditions passes on the quadratic example") {
  ConditionReport rep = validate_conditions(example_cfg());
  CHECK(rep.pass);
  CHECK(rep.wronskian_pass);
  CHECK(rep.wronskian_residual <= 1e-8);
  CHECK(rep.a1.cert.kappa == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.omega_star > 0.0);
  CHECK(rep.y0_bound == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.text.find("overall: PASS") != std::string::npos);
}

TEST_CASE("validate_conditions fails the classic pair on C1") {
  ExperimentConfig cfg = example_cfg();
  cfg.pair_family = "classic";
  ConditionReport rep = validate_conditions(cfg);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.wronskian_pass);
  CHECK(rep.text.find("overall: FAIL") != std::string::npos);
}

TEST_CASE("validate_conditions fails A1 for the quartic at m = 1") {
  ExperimentConfig cfg = example_cfg();
  cfg.cost_name = "quartic";
  cfg.cost_params = {{"center", 0.0}, {"offset", 0.0}, {"radius", 1.0}};
  cfg.a1_m = 1.0;
  cfg.x0 = {0.5};
  cfg.z0_init = 1.0;
  cfg.J0 = 0.05;
  cfg.z0 = 0.5;
  ConditionReport rep = validate_conditions(cfg);
  CHECK_FALSE(rep.pass);
  CHECK(rep.text.find("A1") != std::string::npos);
  CHECK(rep.text.find("FAIL") != std::string::npos);
}
