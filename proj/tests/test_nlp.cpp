// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "trigopt/nlp.hpp"

using namespace trigopt;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("unconstrained convex quadratic solves to stationary point") {
  NlpBuilder b;
  int x = b.add_var(-kInf, kInf, "x");
  int y = b.add_var(-kInf, kInf, "y");
  b.add_objective_term(square(b.var(x) - 3.0) + square(b.var(y) + 1.0));
  NlpProblem p = b.build();
  SolveOptions o;
  o.tol = 1e-8;
  NlpSolution s = solve_nlp(p, o);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.x[1] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(kkt_residual(p, s).worst() <= 1e-8);
}

TEST_CASE("equality constrained QP matches dense KKT oracle") {
  // min 1/2 x^T Q x + c^T x  s.t.  A x = b, with the oracle solved densely.
  Eigen::Matrix3d Q;
  Q << 4, 1, 0, 1, 3, 1, 0, 1, 5;
  Eigen::Vector3d c(1.0, -2.0, 0.5);
  Eigen::Matrix<double, 2, 3> A;
  A << 1, 1, 1, 1, -1, 2;
  Eigen::Vector2d rhs(1.0, 0.5);

  Eigen::Matrix<double, 5, 5> K = Eigen::Matrix<double, 5, 5>::Zero();
  K.topLeftCorner<3, 3>() = Q;
  K.topRightCorner<3, 2>() = A.transpose();
  K.bottomLeftCorner<2, 3>() = A;
  Eigen::Matrix<double, 5, 1> r;
  r << -c, rhs;
  Eigen::Matrix<double, 5, 1> sol = K.fullPivLu().solve(r);

  NlpBuilder b;
  auto ids = b.add_vars(3, -kInf, kInf, "x");
  auto xv = b.vars(ids);
  Expr obj = Expr::constant(0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) obj = obj + 0.5 * Q(i, j) * xv[i] * xv[j];
    obj = obj + c[i] * xv[i];
  }
  b.add_objective_term(obj);
  for (int row = 0; row < 2; ++row)
    b.add_eq(A(row, 0) * xv[0] + A(row, 1) * xv[1] + A(row, 2) * xv[2] - rhs[row]);
  NlpProblem p = b.build();
  SolveOptions o;
  o.tol = 1e-9;
  NlpSolution s = solve_nlp(p, o);
  REQUIRE(s.status == SolveStatus::optimal);
  for (int i = 0; i < 3; ++i) CHECK(s.x[i] == doctest::Approx(sol[i]).epsilon(1e-6));
  // multipliers match the oracle's up to sign convention of the KKT system
  for (int row = 0; row < 2; ++row)
    CHECK(std::abs(std::abs(s.y_eq[row]) - std::abs(sol[3 + row])) <= 1e-5);
}

TEST_CASE("active bound produces the textbook multiplier") {
  NlpBuilder b;
  int x = b.add_var(0.0, kInf, "x");
  b.add_objective_term(square(b.var(x) + 2.0));
  NlpProblem p = b.build();
  SolveOptions o;
  o.tol = 1e-9;
  NlpSolution s = solve_nlp(p, o);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(std::abs(s.x[0]) <= 1e-7);
  CHECK(s.z_lo[0] == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(kkt_residual(p, s).worst() <= 1e-7);
}

TEST_CASE("linear-constraint convex QPs reach tight KKT residuals") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 6;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = u(rng);
    Eigen::MatrixXd Q = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c[i] = u(rng);

    NlpBuilder b;
    auto ids = b.add_vars(n, -5.0, 5.0, "x");
    auto xv = b.vars(ids);
    Expr obj = Expr::constant(0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) obj = obj + 0.5 * Q(i, j) * xv[i] * xv[j];
      obj = obj + c[i] * xv[i];
    }
    b.add_objective_term(obj);
    // a couple of random linear inequalities
    for (int r = 0; r < 3; ++r) {
      Expr lhs = Expr::constant(0.0);
      for (int i = 0; i < n; ++i) lhs = lhs + u(rng) * xv[i];
      b.add_ineq(lhs - 0.5);
    }
    NlpProblem p = b.build();
    SolveOptions o;
    o.tol = 1e-8;
    NlpSolution s = solve_nlp(p, o);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(kkt_residual(p, s).worst() <= 1e-8);
  }
}

TEST_CASE("contradictory inequalities yield a local infeasibility certificate") {
  NlpBuilder b;
  int x = b.add_var(-10.0, 10.0, "x");
  b.add_objective_term(-1.0 * b.var(x));
  b.add_ineq(b.var(x));         // x <= 0
  b.add_ineq(1.0 - b.var(x));   // x >= 1
  NlpProblem p = b.build();
  NlpSolution s = solve_nlp(p, {});
  REQUIRE(s.status == SolveStatus::locally_infeasible);
  CHECK(s.certified_infeasibility > 1e-6);
  CHECK(s.restoration_stationarity >= 0.0);
}

TEST_CASE("nonconvex objective is handled by inertia correction") {
  NlpBuilder b;
  int x = b.add_var(-1.0, 2.0, "x");
  b.add_objective_term(-1.0 * square(b.var(x)));
  NlpProblem p = b.build();
  Eigen::VectorXd x0(1);
  x0 << 0.5;
  NlpSolution s = solve_nlp(p, {}, &x0);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("rosenbrock valley converges with exact and quasi-Newton Hessians") {
  for (bool qn : {false, true}) {
    NlpBuilder b;
    int x = b.add_var(-kInf, kInf, "x");
    int y = b.add_var(-kInf, kInf, "y");
    b.add_objective_term(square(1.0 - b.var(x)) +
                         100.0 * square(b.var(y) - square(b.var(x))));
    NlpProblem p = b.build();
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    SolveOptions o;
    o.quasi_newton = qn;
    o.max_iter = qn ? 2000 : 500;
    NlpSolution s = solve_nlp(p, o, &x0);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(s.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("iteration cap reports max_iter") {
  NlpBuilder b;
  int x = b.add_var(-kInf, kInf, "x");
  int y = b.add_var(-kInf, kInf, "y");
  b.add_objective_term(square(1.0 - b.var(x)) +
                       100.0 * square(b.var(y) - square(b.var(x))));
  NlpProblem p = b.build();
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  SolveOptions o;
  o.max_iter = 3;
  o.retry_quasi_newton = false;
  NlpSolution s = solve_nlp(p, o, &x0);
  CHECK(s.status == SolveStatus::max_iter);
}

TEST_CASE("fixed variables are eliminated, not iterated") {
  NlpBuilder b;
  int x = b.add_var(-kInf, kInf, "x");
  int y = b.add_var(-kInf, kInf, "y");
  b.fix_var(y, 2.0);
  b.add_objective_term(square(b.var(x) - b.var(y)));
  NlpProblem p = b.build();
  NlpSolution s = solve_nlp(p, {});
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.x[1] == 2.0);
  CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("bound override fixes variables per solve without touching the problem") {
  NlpBuilder b;
  int x = b.add_var(0.0, 1.0, "x");
  int y = b.add_var(0.0, 1.0, "y");
  b.add_objective_term(square(b.var(x) - 0.3) + square(b.var(y) - 0.4));
  NlpProblem p = b.build();
  Eigen::VectorXd lb = p.lb, ub = p.ub;
  lb[0] = 1.0;  // fix x = 1
  ub[0] = 1.0;
  NlpSolution s = solve_nlp(p, {}, nullptr, &lb, &ub);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.x[0] == 1.0);
  CHECK(s.x[1] == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(p.lb[0] == 0.0);  // untouched
}

TEST_CASE("repeated solves are deterministic") {
  NlpBuilder b;
  auto ids = b.add_vars(4, -2.0, 3.0, "x");
  auto xv = b.vars(ids);
  b.add_objective_term(square(xv[0] - 1.0) + square(xv[1] + 0.5) + sum_sq({xv[2], xv[3]}) +
                       0.3 * xv[0] * xv[1]);
  b.add_ineq(xv[0] + xv[1] + xv[2] + xv[3] - 1.0);
  b.add_eq(xv[2] - xv[3] - 0.25);
  NlpProblem p = b.build();
  SolveOptions o;
  o.record_trace = true;
  NlpSolution s1 = solve_nlp(p, o);
  NlpSolution s2 = solve_nlp(p, o);
  REQUIRE(s1.status == SolveStatus::optimal);
  CHECK(s1.iterations == s2.iterations);
  REQUIRE(s1.trace_objective.size() == s2.trace_objective.size());
  for (std::size_t i = 0; i < s1.trace_objective.size(); ++i)
    CHECK(s1.trace_objective[i] == s2.trace_objective[i]);
  for (int i = 0; i < 4; ++i) CHECK(s1.x[i] == s2.x[i]);
}

TEST_CASE("kkt_residual flags a non-stationary candidate") {
  NlpBuilder b;
  int x = b.add_var(-kInf, kInf, "x");
  b.add_objective_term(square(b.var(x) - 3.0));
  NlpProblem p = b.build();
  NlpSolution s = solve_nlp(p, {});
  REQUIRE(s.status == SolveStatus::optimal);
  NlpSolution off = s;
  off.x[0] = 1.0;
  CHECK(kkt_residual(p, off).stationarity == doctest::Approx(4.0).epsilon(1e-12));
}
