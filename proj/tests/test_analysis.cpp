#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "esclab/analysis.hpp"
#include "esclab/dynamics.hpp"

using namespace esclab;

namespace {

CostModel quad_s4() {
  return make_cost("quadratic_shifted",
                   {{"center", 1}, {"curvature", 1}, {"offset", 2020}, {"radius", 4}});
}

CostModel quad_with_a1() {
  CostModel m = quad_s4();
  auto est = estimate_a1_constants(m, 1.0, a1_grid(m));
  REQUIRE(est.feasible);
  m.set_a1(est.cert);
  return m;
}

// Spec with the kappa-checked y0: kappa = 2, eps = 0.5 gives the bound
// exactly 1, so y0 = 1.001 clears it.
PracticalSetSpec spec_checked(const CostModel &m) {
  return PracticalSetSpec::make(3.0, 5.0, 1.001, 0.5, 0.25, m);
}

}  // namespace

TEST_CASE("y0 lower bound") {
  CHECK(PracticalSetSpec::y0_lower_bound(2.0, 0.1) ==
        doctest::Approx(0.25 * (1.0 + std::sqrt(2.6))).epsilon(1e-12));
  CHECK(PracticalSetSpec::y0_lower_bound(2.0, 1.0) ==
        doctest::Approx(0.25 * (1.0 + std::sqrt(17.0))).epsilon(1e-12));
  CHECK(PracticalSetSpec::y0_lower_bound(2.0, 0.5) == doctest::Approx(1.0));
  // eps -> 0 limit is 1/kappa
  CHECK(PracticalSetSpec::y0_lower_bound(2.0, 1e-12) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK_THROWS(PracticalSetSpec::y0_lower_bound(0.0, 0.1));
  CHECK_THROWS(PracticalSetSpec::y0_lower_bound(2.0, 0.0));
}

TEST_CASE("practical set construction and validation") {
  CostModel plain = quad_s4();
  CostModel certified = quad_with_a1();

  CHECK_NOTHROW(PracticalSetSpec::make(3.0, 5.0, 1.0, 0.5, 0.25, plain));
  CHECK_THROWS(PracticalSetSpec::make(-1.0, 5.0, 1.0, 0.5, 0.25, plain));
  CHECK_THROWS(PracticalSetSpec::make(3.0, 5.0, 1.0, 0.5, 0.6, plain));   // delta >= eps
  CHECK_THROWS(PracticalSetSpec::make(5.0, 3.0, 1.0, 0.5, 0.25, plain));  // z0 <= J0
  // J0 level set escapes the radius-4 domain (max shifted value is 8)
  CHECK_THROWS(PracticalSetSpec::make(10.0, 12.0, 1.0, 0.5, 0.25, plain));
  // with the certificate, y0 below the bound is rejected
  CHECK_THROWS(PracticalSetSpec::make(3.0, 5.0, 0.9, 0.5, 0.25, certified));
  CHECK_NOTHROW(spec_checked(certified));

  PracticalSetSpec s = PracticalSetSpec::make_auto_y0(3.0, 5.0, 0.5, certified);
  CHECK(s.y0 == doctest::Approx(1.001).epsilon(1e-9));
  CHECK(s.delta == doctest::Approx(0.25));
  CHECK_THROWS(PracticalSetSpec::make_auto_y0(3.0, 5.0, 0.5, plain));
}

TEST_CASE("eval_g at the flagship initial condition") {
  CostModel m = quad_s4();
  PracticalSetSpec s = PracticalSetSpec::make(3.0, 5.0, 1.0, 0.5, 0.25, m);
  auto g = eval_g(s, m, {3.0, 2024.0});
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(-1.0));
  CHECK(g[2] == doctest::Approx(std::tanh(2.0) / 2.0 - 1.0));
  CHECK_THROWS_AS(eval_g(s, m, {3.0, 2022.0}), std::domain_error);
  CHECK_THROWS_AS(eval_g(s, m, {3.0, 2020.0}), std::domain_error);
}

TEST_CASE("in_delta membership") {
  CostModel m = quad_s4();
  PracticalSetSpec s = PracticalSetSpec::make(3.0, 5.0, 1.0, 0.5, 0.25, m);
  auto d = in_delta(s, m, {3.0, 2024.0}, 0.0);
  CHECK(d.member);
  CHECK_FALSE(d.near_active[0]);
  CHECK_FALSE(d.near_active[1]);
  CHECK_FALSE(d.near_active[2]);
  // push J tilde above J0: g1 = 4.5 - 3 > eps
  auto out = in_delta(s, m, {4.0, 2026.0}, s.epsilon);
  CHECK_FALSE(out.member);
  // below the graph: not a member, no throw
  CHECK_FALSE(in_delta(s, m, {3.0, 2021.0}, 0.0).member);
  // g1 within delta of the zero level
  auto near = in_delta(s, m, {1.0 + std::sqrt(6.0), 2026.5}, 0.0);
  CHECK(near.near_active[0]);
}

TEST_CASE("closed forms at pinned points") {
  CostModel m = quad_s4();
  PracticalSetSpec s = PracticalSetSpec::make(3.0, 5.0, 1.0, 0.5, 0.25, m);
  CHECK(closed_form_Fg(s, m, {3.0, 2024.0}, 1) == doctest::Approx(-4.0));
  CHECK(closed_form_Fg(s, m, {3.0, 2024.0}, 2) == doctest::Approx(-2.0));
  // at the minimizer every term of F^{g3} vanishes
  CHECK(closed_form_Fg(s, m, {1.0, 2021.0}, 3) == doctest::Approx(0.0));
  CHECK_THROWS(closed_form_Fg(s, m, {3.0, 2024.0}, 4));
  CHECK_THROWS(closed_form_Fg(s, m, {3.0, 2022.0}, 1));
}

TEST_CASE("closed form F^{g3} against a chain-rule oracle") {
  // d/dt [tanh(Jt^p)/y] along the averaged flow, with the partials taken by
  // finite differences in (Jt, y) coordinates -- independent of the
  // closed-form expression under test.
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto phi = [](double jt, double y) { return std::tanh(jt) / y; };  // p = 1
  for (int band : {1, 3}) {
    for (const Vec &theta : sample_delta_band(s, m, band, 25, 11)) {
      double jt = m.eval_shifted({theta[0]});
      double y = theta[1] - m.eval({theta[0]});
      double g2n = 2.0 * jt;  // |grad J|^2 for the quadratic
      double jdot = -g2n;
      double ydot = -y + g2n;
      double h = 1e-6;
      double djt = (phi(jt + h, y) - phi(jt - h, y)) / (2 * h);
      double dy = (phi(jt, y + h * y) - phi(jt, y - h * y)) / (2 * h * y);
      double oracle = djt * jdot + dy * ydot;
      double cf = closed_form_Fg(s, m, theta, 3);
      CHECK(cf == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("lemma1_terms F^g matches the closed forms on the practical sets") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto pair = make_pair("suttner_dashkovskiy");
  DitherBank bank(2.0, {1});
  for (int which : {1, 2, 3}) {
    int checked = 0;
    for (int band : {0, 1, 2, 3}) {
      for (const Vec &theta : sample_delta_band(s, m, band, 15, 23 + band)) {
        if (m.eval_shifted({theta[0]}) < 1e-2) continue;  // conditioning floor
        double cf = closed_form_Fg(s, m, theta, which);
        auto b = lemma1_terms(m, pair, bank, s, theta, 0.37, which);
        REQUIRE(b.finite);
        CHECK(std::abs(b.F_g - cf) <= 1e-5 * std::max(1.0, std::abs(cf)));
        ++checked;
      }
    }
    CHECK(checked >= 40);
  }
}

TEST_CASE("lemma1_terms R terms vanish identically for g2") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto pair = make_pair("suttner_dashkovskiy");
  DitherBank bank(2.0, {1});
  for (double t : {0.0, 0.123, 1.7}) {
    auto b = lemma1_terms(m, pair, bank, s, {3.0, 2024.0}, t, 2);
    CHECK(b.R1 == 0.0);
    CHECK(b.R2 == 0.0);
    CHECK(b.F_g == doctest::Approx(-2.0).epsilon(1e-6));
  }
}

TEST_CASE("R1 scales like one over sqrt omega") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto pair = make_pair("suttner_dashkovskiy");
  Vec theta{3.0, 2024.0};
  double sup[2];
  int slot = 0;
  for (double omega : {25.0, 100.0}) {
    DitherBank bank(omega, {1});
    double T = bank.fastest_period();
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      auto b = lemma1_terms(m, pair, bank, s, theta, k * T / 200.0, 1);
      worst = std::max(worst, std::abs(b.R1));
    }
    sup[slot++] = worst;
  }
  double ratio = sup[0] / sup[1];
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
}

TEST_CASE("lemma1_residual for g2 is pure quadrature error") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto pair = make_pair("suttner_dashkovskiy");
  DitherBank bank(25.0, {1});
  OdeSystem sys = make_proposed(m, pair, bank);
  IntegrateOptions opts;
  opts.steps_per_fastest_period = 256;
  Trajectory tr = integrate(sys, {3.0, 2024.0}, 1.2, opts);
  REQUIRE_FALSE(tr.truncated);
  CHECK(lemma1_residual(tr, m, pair, bank, s, 2, 0.0, 1.0) < 1e-6);
  CHECK_THROWS(lemma1_residual(tr, m, pair, bank, s, 2, 1.0, 0.5));
}

TEST_CASE("delta band sampling is deterministic and lands in the bands") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto a = sample_delta_band(s, m, 1, 40, 99);
  auto b = sample_delta_band(s, m, 1, 40, 99);
  auto c = sample_delta_band(s, m, 1, 40, 100);
  REQUIRE(a.size() == 40);
  CHECK(a == b);
  CHECK(a != c);
  for (int which : {0, 1, 2, 3}) {
    auto pts = sample_delta_band(s, m, which, 40, 7);
    REQUIRE(pts.size() == 40);
    for (const Vec &theta : pts) {
      auto g = eval_g(s, m, theta);
      for (int i = 0; i < 3; ++i) CHECK(g[i] <= s.epsilon + 1e-9);
      if (which == 0)
        CHECK(std::max({g[0], g[1], g[2]}) <= 1e-9);
      else
        CHECK(g[which - 1] >= -1e-9);
    }
  }
  CHECK_THROWS(sample_delta_band(s, m, 4, 10, 1));
}

TEST_CASE("sampled C2 bounds on the quadratic example") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  auto pair = make_pair("suttner_dashkovskiy");
  DitherBank bank(2.0, {1});
  C2BoundReport rep = sample_c2_bounds(pair, m, s, bank, 150, 3);
  REQUIRE(rep.valid);
  // g2: the control fields have no z-component, so the remainders vanish
  CHECK(rep.g[1].c1 == 0.0);
  CHECK(rep.g[1].c2 == 0.0);
  CHECK(rep.g[1].b >= 1.5 - 1e-9);  // min y on the g2 band
  // g1: -F = |grad J|^2 = 2 Jt with Jt in [J0, J0 + eps]
  CHECK(rep.g[0].b >= 6.0 - 1e-6);
  CHECK(rep.g[0].b <= 7.0 + 1e-6);
  CHECK(rep.g[0].c1 > 0.0);
  CHECK(rep.g[0].c2 > 0.0);
  CHECK(rep.g[2].b > 0.0);
  double ws = estimate_omega_star(rep, s.delta);
  CHECK(std::isfinite(ws));
  CHECK(ws > 0.0);
}

TEST_CASE("omega* formula and error paths") {
  C2BoundReport rep;
  rep.valid = true;
  rep.g[0] = {2.0, 4.0, 1.0, 10};
  rep.g[1] = {0.0, 0.0, 0.0, 10};  // skipped: R terms vanish
  rep.g[2] = {1.0, 1.0, 0.5, 10};
  CHECK(estimate_omega_star(rep, 1.0) == doctest::Approx(16.0));
  // tighter delta makes the c1 branch dominate
  CHECK(estimate_omega_star(rep, 0.5) == doctest::Approx(64.0));
  CHECK_THROWS(estimate_omega_star(rep, 0.0));
  rep.g[0].b = 0.0;
  CHECK_THROWS(estimate_omega_star(rep, 1.0));
  rep.valid = false;
  CHECK_THROWS(estimate_omega_star(rep, 1.0));
}

TEST_CASE("control envelope") {
  Trajectory tr;
  double mags[] = {5, 4, 3, 2, 1, 0.5, 0.25, 0.125, 2.5, 0.1, 0.05};
  for (int k = 0; k < 11; ++k) {
    tr.t.push_back(static_cast<double>(k));
    tr.state.push_back({0.0});
    tr.control.push_back({mags[k] * ((k % 2) ? -1.0 : 1.0)});
  }
  auto env = control_envelope(tr, 2.5);
  CHECK(envelope_at(env, 0.0) == doctest::Approx(5.0));
  CHECK(envelope_at(env, 4.0) == doctest::Approx(3.0));   // trailing max over t in [1.5, 4]
  CHECK(envelope_at(env, 7.0) == doctest::Approx(0.5));
  CHECK(envelope_at(env, 8.0) == doctest::Approx(2.5));   // spike enters the window
  CHECK(envelope_at(env, 10.0) == doctest::Approx(2.5));  // and is still inside at t = 10
  CHECK_THROWS(control_envelope(tr, 1.5));
  Trajectory tiny;
  tiny.t = {0.0};
  tiny.state = {{0.0}};
  tiny.control = {{1.0}};
  CHECK_THROWS(control_envelope(tiny, 1.0));
}

TEST_CASE("convergence report against the analytic averaged flow") {
  CostModel m = quad_with_a1();
  PracticalSetSpec s = spec_checked(m);
  OdeSystem sys = make_lie_approx(m);
  Trajectory tr = integrate(sys, {3.0, 2024.0}, 20.0);
  auto rep = convergence_report(tr, m, 1, true, &s);
  CHECK(rep.final_x_err == doctest::Approx(2.0 * std::exp(-20.0)).epsilon(1e-4));
  double zt = 6.0 * std::exp(-20.0) - 2.0 * std::exp(-40.0);
  CHECK(rep.final_z_err == doctest::Approx(zt).epsilon(1e-4));
  CHECK(rep.monotonicity_violations == 0);
  CHECK(rep.floor_violations == 0);
  CHECK(rep.delta_exit_events == 0);
  CHECK_FALSE(rep.truncated);
}
