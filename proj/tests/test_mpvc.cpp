// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Homotopy driver audits. The attempted-tau schedule under an all-success
// run is frozen here against hand-derived rationals (start 100 * 0.6 = 60,
// then shrink through 30, 12.5, 625/144, 78125/62208, ...), and the solver
// trace must reproduce the arithmetic of the standalone simulator bit for
// bit. Backoff after an infeasible first attempt must retry at 96.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "trigopt/mpvc.hpp"

using namespace trigopt;

namespace {

// Feasible at every relaxation level: the tagged row is inactive at the
// unconstrained optimum, so each homotopy step succeeds.
NlpProblem always_feasible_instance(int* delta_out = nullptr) {
  NlpBuilder b;
  int x = b.add_var(-5.0, 5.0, "x");
  int d = b.add_var(0.0, 1.0, "d");
  b.add_objective_term(square(b.var(x) - 2.0));
  b.add_objective_term(square(b.var(d) - 0.3));
  b.add_ineq(b.var(d) * (1.0 - b.var(x)), true);
  if (delta_out) *delta_out = d;
  return b.build();
}

// Tagged row evaluates to the constant `level` (both factors pinned), so an
// attempt succeeds exactly when tau >= level.
NlpProblem fixed_level_instance(double level) {
  NlpBuilder b;
  int q = b.add_var(-5.0, 5.0, "q");
  int x = b.add_var(10.0, 10.0, "x");
  int y = b.add_var(level / 10.0, level / 10.0, "y");
  b.add_objective_term(square(b.var(q) - 1.0));
  b.add_ineq(b.var(x) * b.var(y), true);
  return b.build();
}

}  // namespace

TEST_CASE("relax shifts tagged rows only and leaves the original intact") {
  NlpBuilder b;
  int x = b.add_var(-10.0, 10.0, "x");
  b.add_objective_term(square(b.var(x)));
  b.add_ineq(b.var(x) - 1.0, false);
  b.add_ineq(b.var(x) * b.var(x) - 4.0, true);
  NlpProblem p = b.build();

  NlpProblem r = relax_vanishing(p, 0.7);
  std::vector<double> at{3.0};
  CHECK(eval(r.ineq[0], at) == doctest::Approx(eval(p.ineq[0], at)));
  CHECK(eval(r.ineq[1], at) == doctest::Approx(eval(p.ineq[1], at) - 0.7));
  CHECK(eval(p.ineq[1], at) == doctest::Approx(5.0));
  CHECK(r.relax == p.relax);

  NlpProblem same = relax_vanishing(p, 0.0);
  CHECK(eval(same.ineq[1], at) == doctest::Approx(5.0));
}

TEST_CASE("all-success run reproduces the simulated schedule exactly") {
  NlpProblem p = always_feasible_instance();
  HomotopyParams hp;
  HomotopyResult res = solve_homotopy(p, hp);

  REQUIRE(res.status == HomotopyStatus::converged);
  std::vector<double> sim = simulated_schedule(hp);
  REQUIRE(res.trace.size() == sim.size());
  for (std::size_t i = 0; i < sim.size(); ++i) {
    CHECK(res.trace[i].tau_attempted == sim[i]);  // bitwise, same update arithmetic
    CHECK(res.trace[i].nlp_status == SolveStatus::optimal);
    CHECK(res.trace[i].accepted);
  }

  // Frozen prefix from exact rational bookkeeping of the update rules.
  REQUIRE(sim.size() >= 5);
  CHECK(sim[0] == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(sim[1] == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(sim[2] == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(sim[3] == doctest::Approx(625.0 / 144.0).epsilon(1e-12));
  CHECK(sim[4] == doctest::Approx(78125.0 / 62208.0).epsilon(1e-12));

  for (std::size_t i = 1; i < sim.size(); ++i) CHECK(sim[i] < sim[i - 1]);
  CHECK(res.tau_final == sim.back());
  CHECK(res.tau_final <= hp.tau_min);
  CHECK(res.solution.status == SolveStatus::optimal);
  CHECK(res.solution.x[0] == doctest::Approx(2.0).epsilon(1e-5));

  HomotopyResult rerun = solve_homotopy(p, hp);
  REQUIRE(rerun.trace.size() == res.trace.size());
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    CHECK(rerun.trace[i].tau_attempted == res.trace[i].tau_attempted);
    CHECK(rerun.trace[i].objective == res.trace[i].objective);
  }
}

TEST_CASE("infeasible first attempt backs off to 96 and accepted taus never rise") {
  // Tagged row pinned at 95: tau = 60 fails, the grown retry at
  // 1.6 * 0.6 * 100 = 96 succeeds, and later capped re-successes at tau0
  // must not displace the accepted value.
  NlpProblem p = fixed_level_instance(95.0);
  HomotopyParams hp;
  hp.max_outer = 12;
  HomotopyResult res = solve_homotopy(p, hp);

  REQUIRE(res.trace.size() == 12);
  CHECK(res.trace[0].tau_attempted == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(res.trace[0].nlp_status == SolveStatus::locally_infeasible);
  CHECK_FALSE(res.trace[0].accepted);

  CHECK(res.trace[1].tau_attempted == doctest::Approx(96.0).epsilon(1e-12));
  CHECK(res.trace[1].nlp_status == SolveStatus::optimal);
  CHECK(res.trace[1].accepted);

  int accepted = 0;
  for (const auto& row : res.trace) {
    CHECK(row.tau_attempted <= 100.0 + 1e-9);  // capped at tau0
    if (row.accepted) ++accepted;
  }
  CHECK(accepted == 1);
  CHECK(res.status == HomotopyStatus::iter_cap);
  CHECK(res.tau_final == doctest::Approx(96.0).epsilon(1e-12));
  CHECK(res.solution.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("permanently infeasible relaxation stalls after the failure budget") {
  NlpProblem p = fixed_level_instance(150.0);  // above tau0, no attempt can pass
  HomotopyParams hp;
  HomotopyResult res = solve_homotopy(p, hp);

  CHECK(res.status == HomotopyStatus::stalled);
  CHECK(static_cast<int>(res.trace.size()) == hp.max_consecutive_infeasible);
  for (const auto& row : res.trace) {
    CHECK_FALSE(row.accepted);
    CHECK(row.nlp_status != SolveStatus::optimal);
  }
  CHECK(std::isnan(res.tau_final));
  CHECK(res.solution.x.size() == 0);

  HomotopyParams tight = hp;
  tight.max_outer = 3;
  HomotopyResult capped = solve_homotopy(p, tight);
  CHECK(capped.status == HomotopyStatus::never_succeeded);
  CHECK(capped.trace.size() == 3);
}

TEST_CASE("problem without tagged rows collapses to a single solve") {
  NlpBuilder b;
  int x = b.add_var(-10.0, 10.0, "x");
  b.add_objective_term(square(b.var(x) - 3.0));
  b.add_ineq(b.var(x) - 8.0, false);
  NlpProblem p = b.build();

  HomotopyResult res = solve_homotopy(p);
  CHECK(res.status == HomotopyStatus::converged);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].tau_attempted == 0.0);
  CHECK(res.trace[0].accepted);
  CHECK(res.tau_final == 0.0);
  CHECK(res.solution.objective == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(res.solution.x[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("vanishing instance drives the indicator to a near-binary value") {
  // Reward pulls delta to 1, which through the product row forces x >= 1 - tau
  // as tau shrinks; the solved point must satisfy the tightened row and end
  // with delta within 1e-2 of a bound.
  NlpBuilder b;
  int x = b.add_var(0.0, 3.0, "x");
  int d = b.add_var(0.0, 1.0, "d");
  b.add_objective_term(square(b.var(x) - 0.5));
  b.add_objective_term(-1.5 * b.var(d));
  b.add_ineq(b.var(d) * (1.0 - b.var(x)), true);
  NlpProblem p = b.build();

  HomotopyParams hp;
  hp.indicators = {d};
  HomotopyResult res = solve_homotopy(p, hp);

  REQUIRE(res.status == HomotopyStatus::converged);
  CHECK(res.tau_final <= hp.tau_min);
  double last_accept = std::numeric_limits<double>::infinity();
  for (const auto& row : res.trace) {
    if (!row.accepted) continue;
    CHECK(row.tau_attempted < last_accept);
    last_accept = row.tau_attempted;
  }

  const Eigen::VectorXd& z = res.solution.x;
  double row_value = z[d] * (1.0 - z[x]);
  CHECK(row_value <= res.tau_final + 1e-8);
  double frac = std::min(z[d], 1.0 - z[d]);
  CHECK(frac <= 1e-2);
  CHECK(z[d] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(z[x] == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(res.trace.back().max_fractionality <= 1e-2);
  CHECK(res.trace.back().vanishing_violation <= res.tau_final + 1e-8);
}

TEST_CASE("stop override ends the sweep early") {
  NlpProblem p = always_feasible_instance();
  HomotopyParams hp;
  hp.tau_stop_override = 20.0;
  HomotopyResult res = solve_homotopy(p, hp);

  CHECK(res.status == HomotopyStatus::converged);
  REQUIRE(res.trace.size() == 3);  // 60, 30, 12.5 then 12.5 < 20 stops
  CHECK(res.tau_final == doctest::Approx(12.5).epsilon(1e-12));
  std::vector<double> sim = simulated_schedule(hp);
  REQUIRE(sim.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(res.trace[i].tau_attempted == sim[i]);
}

TEST_CASE("parameter validation rejects out-of-range settings") {
  NlpProblem p = always_feasible_instance();
  HomotopyParams hp;

  hp.tau0 = 1.0;
  CHECK_THROWS_AS(solve_homotopy(p, hp), std::invalid_argument);
  hp = HomotopyParams{};
  hp.eps0 = 1.2;
  CHECK_THROWS_AS(solve_homotopy(p, hp), std::invalid_argument);
  hp = HomotopyParams{};
  hp.kappa1 = 1.0;
  CHECK_THROWS_AS(solve_homotopy(p, hp), std::invalid_argument);
  hp = HomotopyParams{};
  hp.tau_min = 0.0;
  CHECK_THROWS_AS(simulated_schedule(hp), std::invalid_argument);
}

TEST_CASE("trace formatting lists one line per iteration") {
  NlpProblem p = always_feasible_instance();
  HomotopyResult res = solve_homotopy(p, HomotopyParams{});
  std::string text = format_trace(res.trace);
  CHECK(text.find("tau_attempted") != std::string::npos);
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == res.trace.size() + 1);
}
