// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Sparse NLP container shared by every solver in the toolkit:
//
//   min f(x)  s.t.  g(x) = 0,  h(x) <= 0,  lb <= x <= ub
//
// Problems are plain data plus Expr roots; after construction they are
// treated as immutable and may be shared across threads. Branch-and-bound
// nodes override bounds per solve instead of mutating the problem.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trigopt/expr.hpp"
#include "trigopt/tape.hpp"

namespace trigopt {

struct CompiledNlp;

struct NlpProblem {
  int n = 0;
  Eigen::VectorXd lb, ub;
  Expr objective;
  std::vector<Expr> eq;     // g_i(x) = 0
  std::vector<Expr> ineq;   // h_i(x) <= 0
  std::vector<char> relax;  // per-inequality: subject to homotopy relaxation
  std::vector<int> binaries;  // variables with 0/1 meaning (bounds stay [0,1] here)
  std::vector<std::string> names;  // optional, for diagnostics

  // First/second derivative sparsity (see CompiledNlp); compiled lazily,
  // cached, safe to reuse across solves and threads.
  std::shared_ptr<const CompiledNlp> compiled() const;

 private:
  mutable std::shared_ptr<const CompiledNlp> cache_;
};

// Tapes plus sparsity patterns. Jacobian rows are tape supports; the Hessian
// pattern is the union of element support squares (lower triangle), a
// superset of the true nonzero set.
struct CompiledNlp {
  int n = 0;
  std::vector<Tape> eq_tapes, ineq_tapes;
  std::vector<Tape> obj_tapes;
  std::vector<double> obj_weights;
  double obj_bias = 0.0;

  // COO lower triangle (row >= col) of the Lagrangian Hessian pattern.
  std::vector<int> hess_row, hess_col;
  // Per element tape (objective terms first, then eq, then ineq): flattened
  // lower-triangle scatter slots into hess_row/hess_col order.
  std::vector<std::vector<int>> obj_scatter, eq_scatter, ineq_scatter;

  std::size_t max_slots = 0;   // workspace sizing
  std::size_t max_support = 0;

  std::size_t jacobian_nnz(bool equalities) const;
};

enum class SolveStatus { optimal, max_iter, locally_infeasible, numeric_failure };

const char* to_string(SolveStatus s);

struct KktResidual {
  double stationarity = 0.0;
  double primal = 0.0;        // max constraint violation (eq and ineq)
  double complementarity = 0.0;
  double worst() const { return std::max(stationarity, std::max(primal, complementarity)); }
};

struct NlpSolution {
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd y_eq;      // equality multipliers
  Eigen::VectorXd lam_ineq;  // inequality multipliers, >= 0 at success
  Eigen::VectorXd z_lo, z_up;  // bound multipliers, >= 0
  SolveStatus status = SolveStatus::numeric_failure;
  int iterations = 0;
  KktResidual kkt;
  double constraint_violation = 0.0;
  // Populated when status == locally_infeasible: the l1 infeasibility the
  // restoration phase certified as locally minimal, plus its own residual.
  double certified_infeasibility = -1.0;
  double restoration_stationarity = -1.0;
  bool used_quasi_newton = false;
  std::vector<double> trace_objective;  // per-iteration, for determinism audits
};

struct SolveOptions {
  double tol = 1e-6;
  double constr_tol = 1e-6;
  int max_iter = 3000;
  double mu0 = 0.1;
  double wall_limit_sec = 0.0;  // 0 disables the cap
  int verbosity = 0;
  bool quasi_newton = false;    // damped BFGS instead of exact second order
  bool allow_restoration = true;
  bool retry_quasi_newton = true;  // rerun with BFGS after a numeric failure
  bool record_trace = false;
};

// Interior-point solve. x0, when given, is clipped into the bound interior.
// bound_override replaces problem bounds for this solve only (used by
// branch-and-bound to fix binaries without copying the problem).
NlpSolution solve_nlp(const NlpProblem& p, const SolveOptions& opts = {},
                      const Eigen::VectorXd* x0 = nullptr,
                      const Eigen::VectorXd* lb_override = nullptr,
                      const Eigen::VectorXd* ub_override = nullptr);

// Recomputed residuals for a candidate solution (independent of the solver's
// internal bookkeeping).
KktResidual kkt_residual(const NlpProblem& p, const NlpSolution& s);

// Max violation of constraints and bounds at a point.
double constraint_violation(const NlpProblem& p, const Eigen::VectorXd& x);

class NlpBuilder {
 public:
  int add_var(double lb, double ub, std::string name = {});
  std::vector<int> add_vars(int count, double lb, double ub, const std::string& prefix);
  void fix_var(int i, double value);
  void set_bounds(int i, double lb, double ub);
  Expr var(int i) const { return Expr::variable(i); }
  std::vector<Expr> vars(const std::vector<int>& ids) const;

  void add_objective_term(const Expr& term);
  int add_eq(const Expr& g);
  int add_ineq(const Expr& h, bool relax_tag = false);
  void mark_binary(int var_index);

  int var_count() const { return static_cast<int>(lb_.size()); }
  int eq_count() const { return static_cast<int>(eq_.size()); }
  int ineq_count() const { return static_cast<int>(ineq_.size()); }
  const std::vector<double>& lower_bounds() const { return lb_; }
  const std::vector<double>& upper_bounds() const { return ub_; }

  NlpProblem build() const;

 private:
  std::vector<double> lb_, ub_;
  std::vector<std::string> names_;
  std::vector<Expr> obj_terms_;
  std::vector<Expr> eq_, ineq_;
  std::vector<char> relax_;
  std::vector<int> binaries_;
};

}  // namespace trigopt
