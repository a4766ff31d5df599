// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Direct multiple-shooting transcription of discrete-time optimal control
// problems. States and controls become decision variables in stage-major
// order; interval dynamics enter as equality constraints built from a
// fixed-step classical Runge-Kutta integrator applied at the expression
// level, so exact derivatives of the shooting map come for free.

#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "trigopt/nlp.hpp"

namespace trigopt {

// Continuous-time right-hand side built from expressions. The callback
// receives symbolic state and control vectors and returns dx/dt.
using DynamicsFn =
    std::function<std::vector<Expr>(const std::vector<Expr>&, const std::vector<Expr>&)>;

// One RK4 step of size h with the control held constant, split into
// `substeps` equal sub-intervals. The Expr-step overload supports a step
// length that is itself a decision variable (free final time).
std::vector<Expr> rk4_step(const DynamicsFn& f, std::vector<Expr> x,
                           const std::vector<Expr>& u, double h, int substeps = 1);
std::vector<Expr> rk4_step(const DynamicsFn& f, std::vector<Expr> x,
                           const std::vector<Expr>& u, const Expr& h, int substeps = 1);

struct OcpSpec {
  int nx = 0;
  int nu = 0;
  int horizon = 0;   // number of control intervals N; grid has N+1 nodes
  double dt = 0.0;   // interval length (initial guess for t_f/N when free_tf)
  int substeps = 1;  // integrator sub-steps per interval
  DynamicsFn dynamics;
  Eigen::VectorXd x0;  // initial state, size nx; NaN components stay free
  Eigen::VectorXd x_lb, x_ub;  // per-component state bounds (sizes nx or 0)
  Eigen::VectorXd u_lb, u_ub;  // per-component control bounds (sizes nu or 0)
  std::vector<std::string> state_names;    // optional, size nx
  std::vector<std::string> control_names;  // optional, size nu
  bool free_tf = false;  // final time becomes a decision variable scaling h
  double tf_lb = 0.0, tf_ub = 0.0;  // bounds on t_f when free
  bool rate_augmented = false;      // set by augment_with_rate_control
};

// Rewrites the spec so the old control becomes extra state driven by a new
// rate control: dynamics gain du/dt = mu, control bounds move onto the new
// state block, and the appended initial-state entries stay free (NaN). The
// caller bounds the rate control afterwards if desired. Throws if applied
// twice.
OcpSpec augment_with_rate_control(const OcpSpec& spec);

// Shooting transcription. Owns an NlpBuilder seeded with the grid variables
// and dynamics constraints; scenario code appends costs, path constraints
// and extra variables through builder() before calling build().
class Transcription {
 public:
  explicit Transcription(const OcpSpec& spec);

  NlpBuilder& builder() { return b_; }
  const OcpSpec& spec() const { return spec_; }

  // Variable ids on the grid. States live at nodes k = 0..N, controls on
  // intervals k = 0..N-1.
  int state_index(int k, int i) const;
  int control_index(int k, int i) const;
  std::vector<Expr> state(int k) const;
  std::vector<Expr> control(int k) const;
  int tf_index() const { return tf_id_; }  // -1 when final time is fixed

  NlpProblem build() { return b_.build(); }

 private:
  OcpSpec spec_;
  NlpBuilder b_;
  std::vector<int> xids_, uids_;
  int tf_id_ = -1;
};

// Numeric forward rollout with the same integrator used by the
// transcription. U has one column per interval; the returned matrix has one
// column per grid node.
Eigen::MatrixXd rollout(const DynamicsFn& f, int nx, int nu, const Eigen::VectorXd& x0,
                        const Eigen::MatrixXd& U, double dt, int substeps = 1);

}  // namespace trigopt
