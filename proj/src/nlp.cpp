// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/nlp.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace trigopt {

namespace {

std::mutex g_compile_mutex;

// Lower-triangle scatter for one element tape: for every (i, j) with
// support[i] >= support[j], the slot of (support[i], support[j]) in the COO
// pattern being assembled.
std::vector<int> make_scatter(const Tape& t, std::map<std::pair<int, int>, int>& slot_of,
                              std::vector<int>& rows, std::vector<int>& cols) {
  const auto& sup = t.support();
  const int s = static_cast<int>(sup.size());
  std::vector<int> scatter;
  scatter.reserve(static_cast<std::size_t>(s) * (s + 1) / 2);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j <= i; ++j) {
      std::pair<int, int> key{sup[i], sup[j]};
      auto it = slot_of.find(key);
      if (it == slot_of.end()) {
        it = slot_of.emplace(key, static_cast<int>(rows.size())).first;
        rows.push_back(key.first);
        cols.push_back(key.second);
      }
      scatter.push_back(it->second);
    }
  return scatter;
}

}  // namespace

std::size_t CompiledNlp::jacobian_nnz(bool equalities) const {
  std::size_t nnz = 0;
  for (const auto& t : equalities ? eq_tapes : ineq_tapes) nnz += t.support().size();
  return nnz;
}

std::shared_ptr<const CompiledNlp> NlpProblem::compiled() const {
  std::lock_guard<std::mutex> lock(g_compile_mutex);
  if (cache_) return cache_;
  auto c = std::make_shared<CompiledNlp>();
  c->n = n;
  TermList terms = collect_terms(objective.valid() ? objective : Expr::constant(0.0));
  c->obj_bias = terms.bias;
  c->obj_weights = terms.weights;
  std::map<std::pair<int, int>, int> slot_of;
  for (const auto& root : terms.roots) {
    c->obj_tapes.push_back(Tape::compile(root));
    c->obj_scatter.push_back(make_scatter(c->obj_tapes.back(), slot_of, c->hess_row, c->hess_col));
  }
  for (const auto& g : eq) {
    c->eq_tapes.push_back(Tape::compile(g));
    c->eq_scatter.push_back(make_scatter(c->eq_tapes.back(), slot_of, c->hess_row, c->hess_col));
  }
  for (const auto& h : ineq) {
    c->ineq_tapes.push_back(Tape::compile(h));
    c->ineq_scatter.push_back(make_scatter(c->ineq_tapes.back(), slot_of, c->hess_row, c->hess_col));
  }
  for (const auto& t : c->obj_tapes) {
    c->max_slots = std::max(c->max_slots, t.slot_count());
    c->max_support = std::max(c->max_support, t.support().size());
  }
  for (const auto& t : c->eq_tapes) {
    c->max_slots = std::max(c->max_slots, t.slot_count());
    c->max_support = std::max(c->max_support, t.support().size());
  }
  for (const auto& t : c->ineq_tapes) {
    c->max_slots = std::max(c->max_slots, t.slot_count());
    c->max_support = std::max(c->max_support, t.support().size());
  }
  cache_ = std::move(c);
  return cache_;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::locally_infeasible: return "locally_infeasible";
    case SolveStatus::numeric_failure: return "numeric_failure";
  }
  return "unknown";
}

int NlpBuilder::add_var(double lb, double ub, std::string name) {
  if (!(lb <= ub)) throw std::invalid_argument("add_var: lb must not exceed ub");
  lb_.push_back(lb);
  ub_.push_back(ub);
  names_.push_back(std::move(name));
  return static_cast<int>(lb_.size()) - 1;
}

std::vector<int> NlpBuilder::add_vars(int count, double lb, double ub,
                                      const std::string& prefix) {
  std::vector<int> ids(count);
  for (int i = 0; i < count; ++i) ids[i] = add_var(lb, ub, prefix + "[" + std::to_string(i) + "]");
  return ids;
}

void NlpBuilder::fix_var(int i, double value) {
  lb_.at(i) = value;
  ub_.at(i) = value;
}

void NlpBuilder::set_bounds(int i, double lb, double ub) {
  if (!(lb <= ub)) throw std::invalid_argument("set_bounds: lb must not exceed ub");
  lb_.at(i) = lb;
  ub_.at(i) = ub;
}

std::vector<Expr> NlpBuilder::vars(const std::vector<int>& ids) const {
  std::vector<Expr> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(Expr::variable(i));
  return out;
}

void NlpBuilder::add_objective_term(const Expr& term) { obj_terms_.push_back(term); }

int NlpBuilder::add_eq(const Expr& g) {
  eq_.push_back(g);
  return static_cast<int>(eq_.size()) - 1;
}

int NlpBuilder::add_ineq(const Expr& h, bool relax_tag) {
  ineq_.push_back(h);
  relax_.push_back(relax_tag ? 1 : 0);
  return static_cast<int>(ineq_.size()) - 1;
}

void NlpBuilder::mark_binary(int var_index) { binaries_.push_back(var_index); }

NlpProblem NlpBuilder::build() const {
  NlpProblem p;
  p.n = var_count();
  p.lb = Eigen::Map<const Eigen::VectorXd>(lb_.data(), p.n);
  p.ub = Eigen::Map<const Eigen::VectorXd>(ub_.data(), p.n);
  Expr obj = Expr::constant(0.0);
  for (const auto& t : obj_terms_) obj = obj + t;
  p.objective = obj;
  p.eq = eq_;
  p.ineq = ineq_;
  p.relax = relax_;
  p.binaries = binaries_;
  p.names = names_;
  return p;
}

double constraint_violation(const NlpProblem& p, const Eigen::VectorXd& x) {
  auto c = p.compiled();
  TapeWork ws;
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  double v = 0.0;
  for (const auto& t : c->eq_tapes) v = std::max(v, std::abs(t.value(xs, ws)));
  for (const auto& t : c->ineq_tapes) v = std::max(v, t.value(xs, ws));
  for (int i = 0; i < p.n; ++i) {
    v = std::max(v, p.lb[i] - x[i]);
    v = std::max(v, x[i] - p.ub[i]);
  }
  return v;
}

KktResidual kkt_residual(const NlpProblem& p, const NlpSolution& s) {
  auto c = p.compiled();
  TapeWork ws;
  std::span<const double> xs(s.x.data(), static_cast<std::size_t>(s.x.size()));
  Eigen::VectorXd grad_l = Eigen::VectorXd::Zero(p.n);
  std::vector<double> g(c->max_support);
  for (std::size_t t = 0; t < c->obj_tapes.size(); ++t) {
    const Tape& tape = c->obj_tapes[t];
    tape.gradient(xs, ws, g.data());
    for (int i = 0; i < tape.nin(); ++i)
      grad_l[tape.support()[i]] += c->obj_weights[t] * g[i];
  }
  KktResidual r;
  for (std::size_t j = 0; j < c->eq_tapes.size(); ++j) {
    const Tape& tape = c->eq_tapes[j];
    double v = tape.gradient(xs, ws, g.data());
    r.primal = std::max(r.primal, std::abs(v));
    double y = s.y_eq.size() == static_cast<Eigen::Index>(c->eq_tapes.size()) ? s.y_eq[j] : 0.0;
    for (int i = 0; i < tape.nin(); ++i) grad_l[tape.support()[i]] += y * g[i];
  }
  for (std::size_t j = 0; j < c->ineq_tapes.size(); ++j) {
    const Tape& tape = c->ineq_tapes[j];
    double v = tape.gradient(xs, ws, g.data());
    r.primal = std::max(r.primal, std::max(0.0, v));
    double lam =
        s.lam_ineq.size() == static_cast<Eigen::Index>(c->ineq_tapes.size()) ? s.lam_ineq[j] : 0.0;
    r.complementarity = std::max(r.complementarity, std::abs(lam * v));
    for (int i = 0; i < tape.nin(); ++i) grad_l[tape.support()[i]] += lam * g[i];
  }
  for (int i = 0; i < p.n; ++i) {
    bool fixed = p.ub[i] - p.lb[i] <= 1e-12;
    r.primal = std::max(r.primal, p.lb[i] - s.x[i]);
    r.primal = std::max(r.primal, s.x[i] - p.ub[i]);
    if (fixed) continue;  // stationarity absorbed by the fixing
    double zl = s.z_lo.size() == p.n ? s.z_lo[i] : 0.0;
    double zu = s.z_up.size() == p.n ? s.z_up[i] : 0.0;
    grad_l[i] += zu - zl;
    if (std::isfinite(p.lb[i]))
      r.complementarity = std::max(r.complementarity, std::abs(zl * (s.x[i] - p.lb[i])));
    if (std::isfinite(p.ub[i]))
      r.complementarity = std::max(r.complementarity, std::abs(zu * (p.ub[i] - s.x[i])));
    r.stationarity = std::max(r.stationarity, std::abs(grad_l[i]));
  }
  return r;
}

}  // namespace trigopt
