// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Compilers for logic-activated constraints. An implication
//
//   H(z) > 0  =>  G(z) <= 0
//
// (or a bare indicator, when no trigger H is given) is lowered into one of
// several arithmetic forms: big-M rows with a binary indicator, vanishing
// products with a boxed indicator, an epsilon-margin big-M trigger, or a
// complementarity trigger with an auxiliary variable. Activation rewards can
// enter the cost through the indicator itself, a sigmoid surrogate, or the
// KKT system of a small LP. Product constraints are tagged so the homotopy
// solver can relax them; everything else is exact.

#pragma once

#include <string>
#include <vector>

#include "trigopt/nlp.hpp"

namespace trigopt {

enum class ImplicationMode {
  indicator_bigM,      // binary delta, G <= M(1-delta)
  indicator_vanishing, // boxed delta, delta*G <= 0 (relaxable)
  trigger_eps_bigM,    // binary delta tied to sign of H with margin eps
  trigger_mpcc,        // auxiliary y with 0 <= y perp y-H >= 0 and y*G <= 0
};

enum class HeavisideForm {
  delta_variable,  // cost -w*delta on the paired indicator
  sigmoid,         // cost -w/(1+exp(-beta*H)), no new constraints
  kkt_lp,          // delta plus multipliers reproducing the LP argmax of delta*H
};

struct ImplicationSpec {
  Expr trigger;            // H; leave invalid for a pure indicator
  std::vector<Expr> body;  // G components, all required <= 0 on activation
  ImplicationMode mode = ImplicationMode::indicator_bigM;
  double big_m = 0.0;      // M with G <= M (and H <= M) over the bound box
  double lower_m = 0.0;    // m with H >= -m over the bound box
  double eps = 1e-3;       // strict-activation margin for trigger_eps_bigM
  double weight = 0.0;     // activation reward w >= 0, enters cost as -w*(...)
  HeavisideForm heaviside = HeavisideForm::delta_variable;
  double beta = 10.0;      // sigmoid steepness
  std::string name;
};

enum class ProblemClass { MINLP, MPVC, MPCC };

// Bookkeeping for one compiled implication.
struct CompiledImplication {
  int delta = -1;            // indicator variable, when the form has one
  int y = -1;                // complementarity auxiliary
  int lam1 = -1, lam2 = -1;  // kkt_lp multipliers
  std::vector<int> ineq_ids; // rows appended to the builder
  std::vector<int> eq_ids;
  ProblemClass klass = ProblemClass::MINLP;
};

// Throws std::invalid_argument unless, over the box [lo, hi] (indexed by
// variable id), every G component stays <= M and, when a trigger is present,
// -m <= H <= M holds.
void validate_implication_bounds(const ImplicationSpec& spec, std::span<const double> lo,
                                 std::span<const double> hi);

// The individual lowering rules. All append to the builder and return the
// inequality row indices they created. delta / y must already exist with the
// bounds stated in ImplicationMode.
std::vector<int> big_m_indicator(NlpBuilder& b, const ImplicationSpec& spec, int delta);
std::vector<int> vanishing_indicator(NlpBuilder& b, const ImplicationSpec& spec, int delta);
std::vector<int> eps_big_m_trigger(NlpBuilder& b, const ImplicationSpec& spec, int delta);
std::vector<int> mpcc_trigger(NlpBuilder& b, const ImplicationSpec& spec, int y);

// Two-row trigger form H <= M*delta plus the big-M body rows. Unlike the
// epsilon variant it leaves delta free to activate below the trigger.
std::vector<int> big_m_trigger(NlpBuilder& b, const ImplicationSpec& spec, int delta);

// Bare product H*G <= 0 per component, relaxable. Not an implication (it
// also cuts points where the trigger is negative and the body holds); kept
// for the semantics comparison tests.
std::vector<int> bare_product(NlpBuilder& b, const ImplicationSpec& spec);

// One implication end to end: creates the variables its mode needs,
// validates M against the builder's current bounds, appends the rows and the
// activation reward.
CompiledImplication compile_implication(NlpBuilder& b, const ImplicationSpec& spec);

// Adds the activation reward only; used directly when heaviside = sigmoid,
// or by compile_implication for the other forms. For kkt_lp this creates the
// delta/lambda variables and their stationarity and complementarity rows,
// returning them in the record.
CompiledImplication heaviside_cost(NlpBuilder& b, const ImplicationSpec& spec,
                                   int delta = -1);

// Rounds a relaxed indicator: 1 iff within tol of 1, else 0 (the down-round
// keeps big-M rows feasible; it can only lose activation rewards).
Eigen::VectorXd round_relaxed(const Eigen::VectorXd& delta_hat, double tol = 1e-5);

// Raises every indicator whose body already holds (all G <= 0 at x) and
// whose reward is positive to exactly 1. Only touches the pure indicator
// modes; trigger modes tie the indicator to the trigger sign and must not be
// overridden. Returns the number of raised indicators.
int polish_indicators(Eigen::VectorXd& x, const std::vector<CompiledImplication>& compiled,
                      const std::vector<ImplicationSpec>& specs);

// Forms compared by the semantics (truth table) tests.
enum class LoweredForm { trigger_big_m, trigger_eps_big_m, trigger_mpcc, product };

// Decides whether the compiled form admits a point with the given trigger
// and body values. Compiles the real rows over fixed h/g variables, then
// scans the finite candidate set for the auxiliaries (binary values for
// delta; 0 and max(h,0) for y) against the compiled constraints.
bool admits_sign_case(LoweredForm form, double h_value, double g_value, double big_m,
                      double lower_m, double eps);

}  // namespace trigopt
