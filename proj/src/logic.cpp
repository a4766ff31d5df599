// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/logic.hpp"

#include <cmath>
#include <stdexcept>

namespace trigopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBodyHoldTol = 1e-9;  // slack under which G counts as satisfied

std::string tagged(const std::string& base, const char* suffix) {
  return base.empty() ? std::string(suffix) : base + "_" + suffix;
}

}  // namespace

void validate_implication_bounds(const ImplicationSpec& spec, std::span<const double> lo,
                                 std::span<const double> hi) {
  if (!(spec.big_m > 0.0))
    throw std::invalid_argument("implication: M must be positive");
  for (const Expr& g : spec.body) {
    Interval iv = interval_eval(g, lo, hi);
    if (!(iv.hi <= spec.big_m))
      throw std::invalid_argument("implication: M does not dominate a body component "
                                  "over the bound box");
  }
  if (spec.trigger.valid()) {
    Interval iv = interval_eval(spec.trigger, lo, hi);
    if (!(iv.hi <= spec.big_m))
      throw std::invalid_argument("implication: M does not dominate the trigger");
    if (!(iv.lo >= -spec.lower_m))
      throw std::invalid_argument("implication: -m does not bound the trigger below");
  }
}

std::vector<int> big_m_indicator(NlpBuilder& b, const ImplicationSpec& spec, int delta) {
  ImplicationSpec body_only = spec;
  body_only.trigger = Expr();  // only the body rows carry M here
  validate_implication_bounds(body_only, b.lower_bounds(), b.upper_bounds());
  Expr d = b.var(delta);
  std::vector<int> rows;
  rows.reserve(spec.body.size());
  for (const Expr& g : spec.body)
    rows.push_back(b.add_ineq(g + spec.big_m * d - spec.big_m));
  return rows;
}

std::vector<int> vanishing_indicator(NlpBuilder& b, const ImplicationSpec& spec, int delta) {
  Expr d = b.var(delta);
  std::vector<int> rows;
  rows.reserve(spec.body.size());
  for (const Expr& g : spec.body) rows.push_back(b.add_ineq(d * g, /*relax_tag=*/true));
  return rows;
}

std::vector<int> eps_big_m_trigger(NlpBuilder& b, const ImplicationSpec& spec, int delta) {
  if (!spec.trigger.valid())
    throw std::invalid_argument("eps_big_m_trigger: spec has no trigger");
  if (!(spec.eps > 0.0))
    throw std::invalid_argument("eps_big_m_trigger: eps must be positive");
  validate_implication_bounds(spec, b.lower_bounds(), b.upper_bounds());
  Expr d = b.var(delta);
  std::vector<int> rows;
  rows.push_back(b.add_ineq(spec.trigger - spec.big_m * d));
  // H >= -m(1-delta) + eps, written as a <= 0 row
  rows.push_back(b.add_ineq(spec.lower_m * d + (spec.eps - spec.lower_m) - spec.trigger));
  for (const Expr& g : spec.body)
    rows.push_back(b.add_ineq(g + spec.big_m * d - spec.big_m));
  return rows;
}

std::vector<int> big_m_trigger(NlpBuilder& b, const ImplicationSpec& spec, int delta) {
  if (!spec.trigger.valid())
    throw std::invalid_argument("big_m_trigger: spec has no trigger");
  validate_implication_bounds(spec, b.lower_bounds(), b.upper_bounds());
  Expr d = b.var(delta);
  std::vector<int> rows;
  rows.push_back(b.add_ineq(spec.trigger - spec.big_m * d));
  for (const Expr& g : spec.body)
    rows.push_back(b.add_ineq(g + spec.big_m * d - spec.big_m));
  return rows;
}

std::vector<int> mpcc_trigger(NlpBuilder& b, const ImplicationSpec& spec, int y) {
  if (!spec.trigger.valid())
    throw std::invalid_argument("mpcc_trigger: spec has no trigger");
  Expr yv = b.var(y);
  std::vector<int> rows;
  rows.push_back(b.add_ineq(spec.trigger - yv));                       // y >= H
  rows.push_back(b.add_ineq(yv * (yv - spec.trigger), /*relax=*/true));  // y perp y-H
  for (const Expr& g : spec.body) rows.push_back(b.add_ineq(yv * g, /*relax=*/true));
  return rows;
}

std::vector<int> bare_product(NlpBuilder& b, const ImplicationSpec& spec) {
  if (!spec.trigger.valid())
    throw std::invalid_argument("bare_product: spec has no trigger");
  std::vector<int> rows;
  rows.reserve(spec.body.size());
  for (const Expr& g : spec.body)
    rows.push_back(b.add_ineq(spec.trigger * g, /*relax=*/true));
  return rows;
}

CompiledImplication heaviside_cost(NlpBuilder& b, const ImplicationSpec& spec, int delta) {
  CompiledImplication out;
  switch (spec.heaviside) {
    case HeavisideForm::delta_variable:
      if (delta < 0)
        throw std::invalid_argument("heaviside_cost: delta_variable needs an indicator");
      out.delta = delta;
      if (spec.weight != 0.0) b.add_objective_term(-spec.weight * b.var(delta));
      break;
    case HeavisideForm::sigmoid: {
      if (!spec.trigger.valid())
        throw std::invalid_argument("heaviside_cost: sigmoid needs a trigger");
      if (spec.weight != 0.0) {
        Expr sig = 1.0 / (1.0 + exp(-spec.beta * spec.trigger));
        b.add_objective_term(-spec.weight * sig);
      }
      break;
    }
    case HeavisideForm::kkt_lp: {
      if (!spec.trigger.valid())
        throw std::invalid_argument("heaviside_cost: kkt_lp needs a trigger");
      out.delta = b.add_var(0.0, 1.0, tagged(spec.name, "delta"));
      out.lam1 = b.add_var(0.0, kInf, tagged(spec.name, "lam1"));
      out.lam2 = b.add_var(0.0, kInf, tagged(spec.name, "lam2"));
      Expr d = b.var(out.delta), l1 = b.var(out.lam1), l2 = b.var(out.lam2);
      out.eq_ids.push_back(b.add_eq(spec.trigger - l1 + l2));
      out.ineq_ids.push_back(b.add_ineq(l1 * (1.0 - d), /*relax=*/true));
      out.ineq_ids.push_back(b.add_ineq(l2 * d, /*relax=*/true));
      if (spec.weight != 0.0) b.add_objective_term(-spec.weight * d);
      out.klass = ProblemClass::MPCC;
      break;
    }
  }
  return out;
}

CompiledImplication compile_implication(NlpBuilder& b, const ImplicationSpec& spec) {
  CompiledImplication out;
  switch (spec.mode) {
    case ImplicationMode::indicator_bigM: {
      out.delta = b.add_var(0.0, 1.0, tagged(spec.name, "delta"));
      b.mark_binary(out.delta);
      out.ineq_ids = big_m_indicator(b, spec, out.delta);
      out.klass = ProblemClass::MINLP;
      break;
    }
    case ImplicationMode::indicator_vanishing: {
      out.delta = b.add_var(0.0, 1.0, tagged(spec.name, "delta"));
      out.ineq_ids = vanishing_indicator(b, spec, out.delta);
      out.klass = ProblemClass::MPVC;
      break;
    }
    case ImplicationMode::trigger_eps_bigM: {
      out.delta = b.add_var(0.0, 1.0, tagged(spec.name, "delta"));
      b.mark_binary(out.delta);
      out.ineq_ids = eps_big_m_trigger(b, spec, out.delta);
      out.klass = ProblemClass::MINLP;
      break;
    }
    case ImplicationMode::trigger_mpcc: {
      double y_ub = spec.big_m > 0.0 ? spec.big_m : kInf;
      out.y = b.add_var(0.0, y_ub, tagged(spec.name, "y"));
      out.ineq_ids = mpcc_trigger(b, spec, out.y);
      out.klass = ProblemClass::MPCC;
      break;
    }
  }
  if (spec.weight != 0.0 || spec.heaviside == HeavisideForm::kkt_lp) {
    CompiledImplication cost = heaviside_cost(b, spec, out.delta);
    if (out.delta < 0) out.delta = cost.delta;
    out.lam1 = cost.lam1;
    out.lam2 = cost.lam2;
    for (int id : cost.ineq_ids) out.ineq_ids.push_back(id);
    for (int id : cost.eq_ids) out.eq_ids.push_back(id);
    if (cost.klass == ProblemClass::MPCC) out.klass = ProblemClass::MPCC;
  }
  return out;
}

Eigen::VectorXd round_relaxed(const Eigen::VectorXd& delta_hat, double tol) {
  Eigen::VectorXd out(delta_hat.size());
  for (Eigen::Index i = 0; i < delta_hat.size(); ++i)
    out[i] = delta_hat[i] >= 1.0 - tol ? 1.0 : 0.0;
  return out;
}

int polish_indicators(Eigen::VectorXd& x, const std::vector<CompiledImplication>& compiled,
                      const std::vector<ImplicationSpec>& specs) {
  if (compiled.size() != specs.size())
    throw std::invalid_argument("polish_indicators: record/spec size mismatch");
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  int raised = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ImplicationSpec& s = specs[i];
    const CompiledImplication& c = compiled[i];
    if (s.weight <= 0.0 || c.delta < 0) continue;
    if (s.mode != ImplicationMode::indicator_bigM &&
        s.mode != ImplicationMode::indicator_vanishing)
      continue;
    if (x[c.delta] >= 1.0) continue;
    bool holds = true;
    for (const Expr& g : s.body)
      if (!(eval(g, xs) <= kBodyHoldTol)) {
        holds = false;
        break;
      }
    if (holds) {
      x[c.delta] = 1.0;
      ++raised;
    }
  }
  return raised;
}

bool admits_sign_case(LoweredForm form, double h_value, double g_value, double big_m,
                      double lower_m, double eps) {
  NlpBuilder b;
  int hv = b.add_var(h_value, h_value, "h");
  int gv = b.add_var(g_value, g_value, "g");
  ImplicationSpec spec;
  spec.trigger = b.var(hv);
  spec.body = {b.var(gv)};
  spec.big_m = big_m;
  spec.lower_m = lower_m;
  spec.eps = eps;

  int aux = -1;
  std::vector<double> candidates;
  switch (form) {
    case LoweredForm::trigger_big_m:
      aux = b.add_var(0.0, 1.0, "delta");
      big_m_trigger(b, spec, aux);
      candidates = {0.0, 1.0};
      break;
    case LoweredForm::trigger_eps_big_m:
      aux = b.add_var(0.0, 1.0, "delta");
      eps_big_m_trigger(b, spec, aux);
      candidates = {0.0, 1.0};
      break;
    case LoweredForm::trigger_mpcc:
      aux = b.add_var(0.0, kInf, "y");
      mpcc_trigger(b, spec, aux);
      candidates = {0.0, std::max(h_value, 0.0)};
      break;
    case LoweredForm::product:
      bare_product(b, spec);
      candidates = {0.0};  // unused placeholder; no auxiliary exists
      break;
  }
  NlpProblem p = b.build();
  Eigen::VectorXd x(p.n);
  x[hv] = h_value;
  x[gv] = g_value;
  for (double cand : candidates) {
    if (aux >= 0) x[aux] = cand;
    if (constraint_violation(p, x) <= 1e-9) return true;
    if (aux < 0) break;
  }
  return false;
}

}  // namespace trigopt
