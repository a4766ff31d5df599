// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "trigopt/expr.hpp"
#include "trigopt/tape.hpp"

using namespace trigopt;

namespace {

Expr v(int i) { return Expr::variable(i); }

// A moderately nasty composite touching every node kind except Tan.
Expr sample_expr() {
  Expr x0 = v(0), x1 = v(1), x2 = v(2);
  Expr a = sin(x0) * cos(x1) + exp(0.3 * x2);
  Expr b = norm2({x0 - 1.0, x1 + 2.0, x2});
  Expr c = sum_sq({x0 * x1, x2 - 0.5});
  return a + 0.7 * b - square(c - 2.0) / 5.0 + pow(x2 + 4.0, 1.5) - (-x1);
}

}  // namespace

TEST_CASE("evaluation matches hand-computed values") {
  std::vector<double> x{0.5, -1.25, 2.0};
  CHECK(eval(v(1), x) == -1.25);
  CHECK(eval(v(0) + v(2), x) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(eval(v(0) * v(1), x) == doctest::Approx(-0.625).epsilon(1e-15));
  CHECK(eval(3.0 * v(0) - 2.0, x) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(eval(square(v(2)), x) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(eval(norm2({v(0), v(1)}), x) == doctest::Approx(std::hypot(0.5, -1.25)).epsilon(1e-15));
  CHECK(eval(sum_sq({v(0), v(1)}), x) == doctest::Approx(0.25 + 1.5625).epsilon(1e-15));
  CHECK(eval(sin(v(0)), x) == doctest::Approx(std::sin(0.5)).epsilon(1e-15));
  CHECK(eval(tan(v(0)), x) == doctest::Approx(std::tan(0.5)).epsilon(1e-15));
  CHECK(eval(v(0) / v(2), x) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("constant folding keeps graphs small") {
  Expr c = Expr::constant(2.0) * Expr::constant(3.0) + 1.0;
  CHECK(c.is_const());
  CHECK(c.const_value() == 7.0);
  CHECK(sqrt(Expr::constant(16.0)).const_value() == 4.0);
  CHECK_THROWS_AS(sqrt(Expr::constant(-1.0)), DomainError);
}

TEST_CASE("support reports sorted referenced variables") {
  Expr e = v(7) * v(2) + sin(v(5)) - v(2);
  CHECK(e.support() == std::vector<int>{2, 5, 7});
}

TEST_CASE("sqrt raises domain error on negative input") {
  std::vector<double> x{-4.0};
  CHECK_THROWS_AS(eval(sqrt(v(0)), x), DomainError);
}

TEST_CASE("norm value is defined at zero but derivatives are guarded") {
  Expr n = norm2({v(0), v(1)});
  std::vector<double> zero{0.0, 0.0};
  CHECK(eval(n, zero) == 0.0);
  Tape t = Tape::compile(n);
  TapeWork ws;
  double g[2];
  CHECK_THROWS_AS(t.gradient(zero, ws, g), DomainError);
  std::vector<double> ok{3e-9, 4e-9};
  CHECK_NOTHROW(t.gradient(ok, ws, g));
  std::vector<double> inside{3e-10, 4e-10};  // norm 5e-10 < guard
  CHECK_THROWS_AS(t.gradient(inside, ws, g), DomainError);
}

TEST_CASE("tape value agrees with recursive evaluation") {
  Expr e = sample_expr();
  Tape t = Tape::compile(e);
  TapeWork ws;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x{dist(rng), dist(rng), dist(rng)};
    CHECK(t.value(x, ws) == doctest::Approx(eval(e, x)).epsilon(1e-14));
  }
}

TEST_CASE("tape gradient matches centered finite differences") {
  Expr e = sample_expr();
  Tape t = Tape::compile(e);
  TapeWork ws;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.2, 1.2);
  auto f = [&](const std::vector<double>& x) { return eval(e, x); };
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x{dist(rng), dist(rng), dist(rng)};
    std::vector<double> g(3);
    t.gradient(x, ws, g.data());
    auto fd = testutil::fd_gradient(f, x);
    for (int i = 0; i < 3; ++i) CHECK(testutil::rel_err(g[i], fd[i]) <= 1e-5);
  }
}

TEST_CASE("tape hessian matches finite differences of the gradient") {
  Expr e = sample_expr();
  Tape t = Tape::compile(e);
  TapeWork ws;
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x{dist(rng), dist(rng), dist(rng)};
    std::vector<double> g(3), h(9);
    t.hessian(x, ws, g.data(), h.data());
    for (int j = 0; j < 3; ++j) {
      auto gj = [&](const std::vector<double>& p) {
        std::vector<double> gg(3);
        TapeWork w2;
        t.gradient(p, w2, gg.data());
        return gg[j];
      };
      auto fd = testutil::fd_gradient(gj, x, 1e-5);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(h[i * 3 + j] - fd[i]) <= 1e-4 * std::max(1.0, std::abs(fd[i])));
      }
    }
    // symmetry is exact by construction
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(h[i * 3 + j] == h[j * 3 + i]);
  }
}

TEST_CASE("second derivatives of trig chain are exact") {
  // d2/dx2 sin(2x) = -4 sin(2x)
  Expr e = sin(2.0 * v(0));
  Tape t = Tape::compile(e);
  TapeWork ws;
  std::vector<double> x{0.37};
  double g, h;
  t.hessian(x, ws, &g, &h);
  CHECK(g == doctest::Approx(2.0 * std::cos(0.74)).epsilon(1e-14));
  CHECK(h == doctest::Approx(-4.0 * std::sin(0.74)).epsilon(1e-14));
}

TEST_CASE("interval evaluation encloses sampled values") {
  Expr e = sample_expr();
  std::vector<double> lo{-1.0, -0.5, 0.0}, hi{0.5, 1.0, 2.0};
  Interval box = interval_eval(e, lo, hi);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(3);
    for (int i = 0; i < 3; ++i) {
      std::uniform_real_distribution<double> d(lo[i], hi[i]);
      x[i] = d(rng);
    }
    double val = eval(e, x);
    CHECK(val >= box.lo - 1e-9);
    CHECK(val <= box.hi + 1e-9);
  }
}

TEST_CASE("interval evaluation is exact for linear rows") {
  // 2x - 3y + 1 over x in [0,1], y in [-1,2]
  Expr row = 2.0 * v(0) - 3.0 * v(1) + 1.0;
  std::vector<double> lo{0.0, -1.0}, hi{1.0, 2.0};
  Interval box = interval_eval(row, lo, hi);
  CHECK(box.lo == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(box.hi == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("interval for sine covers critical points") {
  Expr e = sin(v(0));
  std::vector<double> lo{0.0}, hi{3.0};  // contains pi/2
  Interval box = interval_eval(e, lo, hi);
  CHECK(box.hi == doctest::Approx(1.0));
  CHECK(box.lo == doctest::Approx(std::min(std::sin(0.0), std::sin(3.0))));
}

TEST_CASE("collect_terms splits weighted sums") {
  Expr e = 2.0 * square(v(0)) - 3.0 * sin(v(1)) + 4.0;
  TermList t = collect_terms(e);
  CHECK(t.bias == 4.0);
  REQUIRE(t.weights.size() == 2);
  CHECK(t.weights[0] == 2.0);
  CHECK(t.weights[1] == -3.0);
}
