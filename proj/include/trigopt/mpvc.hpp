// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Homotopy driver for programs with vanishing or complementarity product
// constraints. Tagged rows P(z) <= 0 are relaxed to P(z) <= tau and tau is
// driven down through warm-started solves: attempt tau = eps*tau_star; a
// success stores the point and shrinks eps by kappa1, a locally infeasible
// solve backs off by growing eps with kappa0 and retrying. Two engineering
// guards close termination gaps the plain update rules leave open: attempted
// tau is capped at tau0, and tau_star only moves down, so a backed-off
// success above the current tau_star refreshes eps but never loosens the
// accepted relaxation.

#pragma once

#include <vector>

#include "trigopt/nlp.hpp"

namespace trigopt {

struct HomotopyParams {
  double tau0 = 1e2;
  double eps0 = 0.6;
  double tau_min = 1e-3;
  double kappa0 = 1.6;  // infeasibility backoff factor
  double kappa1 = 1.2;  // post-success shrink factor
  int max_outer = 50;
  int max_consecutive_infeasible = 10;
  double tau_stop_override = 0.0;  // > 0 replaces tau_min as the stop line
  std::vector<int> indicators;     // variables whose fractionality the trace reports
  SolveOptions nlp;
};

enum class HomotopyStatus { converged, stalled, iter_cap, never_succeeded };

const char* to_string(HomotopyStatus s);

struct HomotopyTraceRow {
  int iter = 0;
  double tau_attempted = 0.0;
  SolveStatus nlp_status = SolveStatus::numeric_failure;
  bool accepted = false;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double vanishing_violation = 0.0;  // max positive part of tagged rows at tau = 0
  double max_fractionality = 0.0;    // max_i min(delta_i, 1 - delta_i)
};

struct HomotopyResult {
  NlpSolution solution;  // last accepted point
  double tau_final = std::numeric_limits<double>::quiet_NaN();
  HomotopyStatus status = HomotopyStatus::never_succeeded;
  std::vector<HomotopyTraceRow> trace;
  int outer_iterations = 0;
};

// Copy of p with every relax-tagged inequality shifted by tau. tau = 0
// returns an equivalent problem.
NlpProblem relax_vanishing(const NlpProblem& p, double tau);

// Validates params (tau0 > 1, 0 < eps0 < 1, 0 < tau_min < 1, kappas > 1).
HomotopyResult solve_homotopy(const NlpProblem& p, const HomotopyParams& params = {},
                              const Eigen::VectorXd* guess = nullptr);

// Attempted-tau sequence assuming every solve succeeds; mirrors the solver's
// arithmetic exactly so traces can be audited against it.
std::vector<double> simulated_schedule(const HomotopyParams& params, int max_steps = 64);

// Writes the trace as aligned tabular text, one row per outer iteration.
std::string format_trace(const std::vector<HomotopyTraceRow>& trace);

}  // namespace trigopt
