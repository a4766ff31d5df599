// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/mpvc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trigopt {

const char* to_string(HomotopyStatus s) {
  switch (s) {
    case HomotopyStatus::converged: return "converged";
    case HomotopyStatus::stalled: return "stalled";
    case HomotopyStatus::iter_cap: return "iter_cap";
    case HomotopyStatus::never_succeeded: return "never_succeeded";
  }
  return "?";
}

NlpProblem relax_vanishing(const NlpProblem& p, double tau) {
  // Fresh instance on purpose: copying p would drag its compiled-tape cache
  // along, and the shifted rows need their own tapes.
  NlpProblem out;
  out.n = p.n;
  out.lb = p.lb;
  out.ub = p.ub;
  out.objective = p.objective;
  out.eq = p.eq;
  out.ineq = p.ineq;
  out.relax = p.relax;
  out.binaries = p.binaries;
  out.names = p.names;
  if (tau != 0.0) {
    for (std::size_t i = 0; i < out.ineq.size(); ++i) {
      if (i < out.relax.size() && out.relax[i]) out.ineq[i] = out.ineq[i] - tau;
    }
  }
  return out;
}

namespace {

void check_params(const HomotopyParams& hp) {
  if (!(hp.tau0 > 1.0)) throw std::invalid_argument("homotopy: tau0 must exceed 1");
  if (!(hp.eps0 > 0.0 && hp.eps0 < 1.0)) throw std::invalid_argument("homotopy: eps0 must lie in (0,1)");
  if (!(hp.tau_min > 0.0 && hp.tau_min < 1.0)) throw std::invalid_argument("homotopy: tau_min must lie in (0,1)");
  if (!(hp.kappa0 > 1.0 && hp.kappa1 > 1.0)) throw std::invalid_argument("homotopy: kappa factors must exceed 1");
  if (hp.max_outer < 1) throw std::invalid_argument("homotopy: max_outer must be positive");
}

double tagged_violation(const NlpProblem& p, const Eigen::VectorXd& x) {
  std::vector<double> xs(x.data(), x.data() + x.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < p.ineq.size(); ++i) {
    if (i < p.relax.size() && p.relax[i]) worst = std::max(worst, eval(p.ineq[i], xs));
  }
  return worst;
}

double indicator_fractionality(const std::vector<int>& ids, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (int i : ids) {
    if (i < 0 || i >= x.size()) continue;
    worst = std::max(worst, std::min(x[i], 1.0 - x[i]));
  }
  return worst;
}

}  // namespace

HomotopyResult solve_homotopy(const NlpProblem& p, const HomotopyParams& hp,
                              const Eigen::VectorXd* guess) {
  check_params(hp);
  HomotopyResult res;

  bool any_tagged = false;
  for (char t : p.relax)
    if (t) any_tagged = true;

  // Nothing to relax: the homotopy degenerates to one plain solve.
  if (!any_tagged) {
    NlpSolution sol = solve_nlp(p, hp.nlp, guess);
    HomotopyTraceRow row;
    row.iter = 0;
    row.tau_attempted = 0.0;
    row.nlp_status = sol.status;
    row.accepted = sol.status == SolveStatus::optimal;
    row.objective = sol.objective;
    row.max_fractionality = sol.x.size() ? indicator_fractionality(hp.indicators, sol.x) : 0.0;
    res.trace.push_back(row);
    res.outer_iterations = 1;
    if (row.accepted) {
      res.solution = std::move(sol);
      res.tau_final = 0.0;
      res.status = HomotopyStatus::converged;
    }
    return res;
  }

  const double stop_line = hp.tau_stop_override > 0.0 ? hp.tau_stop_override : hp.tau_min;

  double tau_star = hp.tau0;
  double eps = hp.eps0;
  Eigen::VectorXd z_star;
  bool have_z = false;
  if (guess && guess->size() == p.n) {
    z_star = *guess;
    have_z = true;
  }
  int consecutive_fail = 0;

  while (tau_star > stop_line && res.outer_iterations < hp.max_outer) {
    const double tau = std::min(eps * tau_star, hp.tau0);
    NlpProblem relaxed = relax_vanishing(p, tau);
    NlpSolution sol = solve_nlp(relaxed, hp.nlp, have_z ? &z_star : nullptr);

    HomotopyTraceRow row;
    row.iter = res.outer_iterations;
    row.tau_attempted = tau;
    row.nlp_status = sol.status;
    row.objective = sol.objective;
    if (sol.x.size() == p.n) {
      row.vanishing_violation = tagged_violation(p, sol.x);
      row.max_fractionality = indicator_fractionality(hp.indicators, sol.x);
    }

    if (sol.status == SolveStatus::optimal) {
      consecutive_fail = 0;
      // A success below tau_star tightens the relaxation; one at or above it
      // (only reachable after backoffs pushed eps past 1) just resets eps so
      // the next attempts shrink again.
      if (tau < tau_star) {
        row.accepted = true;
        tau_star = tau;
        z_star = sol.x;
        have_z = true;
        res.solution = std::move(sol);
        res.tau_final = tau;
      }
      eps = eps / hp.kappa1;
    } else {
      ++consecutive_fail;
      eps = hp.kappa0 * eps;
    }
    res.trace.push_back(row);
    ++res.outer_iterations;

    if (consecutive_fail >= hp.max_consecutive_infeasible) {
      res.status = HomotopyStatus::stalled;
      return res;
    }
  }

  if (tau_star <= stop_line) {
    res.status = HomotopyStatus::converged;
  } else if (res.solution.x.size() == p.n) {
    res.status = HomotopyStatus::iter_cap;
  } else {
    res.status = HomotopyStatus::never_succeeded;
  }
  return res;
}

std::vector<double> simulated_schedule(const HomotopyParams& hp, int max_steps) {
  check_params(hp);
  const double stop_line = hp.tau_stop_override > 0.0 ? hp.tau_stop_override : hp.tau_min;
  std::vector<double> attempts;
  double tau_star = hp.tau0;
  double eps = hp.eps0;
  int iters = 0;
  while (tau_star > stop_line && iters < hp.max_outer &&
         static_cast<int>(attempts.size()) < max_steps) {
    const double tau = std::min(eps * tau_star, hp.tau0);
    attempts.push_back(tau);
    if (tau < tau_star) tau_star = tau;
    eps = eps / hp.kappa1;
    ++iters;
  }
  return attempts;
}

std::string format_trace(const std::vector<HomotopyTraceRow>& trace) {
  std::ostringstream os;
  os << "iter  tau_attempted   status              accepted  objective       "
        "vanish_viol     fractionality\n";
  for (const auto& r : trace) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-5d %-15.8g %-19s %-9s %-15.8g %-15.8g %-15.8g\n",
                  r.iter, r.tau_attempted, to_string(r.nlp_status), r.accepted ? "yes" : "no",
                  r.objective, r.vanishing_violation, r.max_fractionality);
    os << line;
  }
  return os.str();
}

}  // namespace trigopt
