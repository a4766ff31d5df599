// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Nonlinear branch-and-bound over problems whose binary structure comes from
// indicator variables (bounds [0,1] plus an integrality mark). Every node is
// a continuous interior-point solve with the fixed binaries clamped through
// bound overrides; children are warm-started from the parent's primal point.
// Relaxation objectives give valid pruning bounds for convex instances; for
// nonconvex ones the result is a feasible point, not a certificate, which
// matches what nonlinear branch-and-bound can promise.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trigopt/nlp.hpp"

namespace trigopt {

struct BnbOptions {
  int node_limit = 100000;
  double int_tol = 1e-5;    // |delta - round(delta)| below this counts integral
  double feas_tol = 1e-6;   // incumbent acceptance: full constraint violation
  double prune_slack = 1e-9;  // prune only when bound >= incumbent - prune_slack
  int workers = 1;            // > 1 trades determinism for speed
  double wall_limit_sec = 0.0;  // 0 disables
  SolveOptions nlp;
  std::string node_log_path;  // line-delimited node records; empty disables
};

enum class MinlpStatus { optimal_within_tree, feasible, infeasible, node_limit };

const char* to_string(MinlpStatus s);

struct MinlpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd binary_values;  // one entry per integrality mark, in {0,1}
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent_history;  // non-increasing
  int node_count = 0;
  MinlpStatus status = MinlpStatus::infeasible;
};

// One open node of the search tree.
struct BnbNode {
  std::map<int, int> fixings;  // variable id -> fixed binary value
  double bound = -std::numeric_limits<double>::infinity();  // parent relaxation
  Eigen::VectorXd warm;
  int depth = 0;
  std::uint64_t seq = 0;
};

// Position (into marks) of the most fractional entry of x, ties to the
// lowest index; -1 when every marked entry is integral within int_tol.
int select_branch_variable(const Eigen::VectorXd& x, const std::vector<int>& marks,
                           double int_tol = 1e-5);

MinlpSolution solve_bnb(const NlpProblem& p, const BnbOptions& opts = {},
                        const Eigen::VectorXd* x0 = nullptr);

// Ground-truth oracle: one NLP per binary assignment, best feasible wins.
// Throws when more than cap binaries are marked.
MinlpSolution enumerate_exhaustive(const NlpProblem& p, const BnbOptions& opts = {},
                                   int cap = 16, const Eigen::VectorXd* x0 = nullptr);

}  // namespace trigopt
