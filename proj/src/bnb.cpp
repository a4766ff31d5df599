// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/bnb.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "trigopt/logic.hpp"

namespace trigopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double eval_objective(const NlpProblem& p, const Eigen::VectorXd& x) {
  return eval(p.objective, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

// best node: lowest bound, then deepest, then oldest
bool node_before(const BnbNode& a, const BnbNode& b) {
  if (a.bound != b.bound) return a.bound < b.bound;
  if (a.depth != b.depth) return a.depth > b.depth;
  return a.seq < b.seq;
}

struct Search {
  const NlpProblem& p;
  const BnbOptions& opts;
  std::vector<BnbNode> open;
  double incumbent_obj = kInf;
  Eigen::VectorXd incumbent_x;
  Eigen::VectorXd incumbent_bins;
  std::vector<double> history;
  int popped = 0;
  std::uint64_t next_seq = 0;
  bool exhaustive = true;
  bool capped = false;
  int busy = 0;
  std::mutex mu;
  std::condition_variable cv;
  std::ofstream log;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Search(const NlpProblem& prob, const BnbOptions& o) : p(prob), opts(o) {
    if (!opts.node_log_path.empty()) log.open(opts.node_log_path, std::ios::trunc);
  }

  // callers hold mu
  void log_node(const BnbNode& n, const char* action, const char* nlp_status,
                double objective) {
    if (!log.is_open()) return;
    nlohmann::json rec;
    rec["seq"] = n.seq;
    rec["depth"] = n.depth;
    nlohmann::json fix = nlohmann::json::object();
    for (const auto& [var, val] : n.fixings) fix[std::to_string(var)] = val;
    rec["fixings"] = std::move(fix);
    rec["action"] = action;
    rec["nlp_status"] = nlp_status;
    rec["bound"] = n.bound;
    if (std::isfinite(objective)) rec["objective"] = objective;
    rec["incumbent"] = std::isfinite(incumbent_obj) ? incumbent_obj : 0.0;
    rec["have_incumbent"] = std::isfinite(incumbent_obj);
    log << rec.dump() << "\n";
  }

  bool over_caps() {
    if (popped >= opts.node_limit) return true;
    if (opts.wall_limit_sec > 0.0) {
      double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (sec > opts.wall_limit_sec) return true;
    }
    return false;
  }

  // callers hold mu; strict improvement only
  void offer_incumbent(double obj, const Eigen::VectorXd& x) {
    if (obj >= incumbent_obj) return;
    incumbent_obj = obj;
    incumbent_x = x;
    incumbent_bins.resize(static_cast<Eigen::Index>(p.binaries.size()));
    for (std::size_t j = 0; j < p.binaries.size(); ++j)
      incumbent_bins[static_cast<Eigen::Index>(j)] = std::round(x[p.binaries[j]]);
    history.push_back(obj);
  }
};

// snapped copy of x with every binary rounded by the integrality rule
Eigen::VectorXd snap_binaries(const NlpProblem& p, const Eigen::VectorXd& x, double tol) {
  Eigen::VectorXd out = x;
  for (int b : p.binaries) out[b] = x[b] >= 1.0 - tol ? 1.0 : (x[b] <= tol ? 0.0 : x[b]);
  return out;
}

bool all_integral(const NlpProblem& p, const Eigen::VectorXd& x, double tol) {
  for (int b : p.binaries)
    if (std::abs(x[b] - std::round(x[b])) > tol) return false;
  return true;
}

int lowest_unfixed(const NlpProblem& p, const std::map<int, int>& fixings) {
  for (int b : p.binaries)
    if (!fixings.count(b)) return b;
  return -1;
}

void worker(Search& s) {
  const int nb = static_cast<int>(s.p.binaries.size());
  std::unique_lock lk(s.mu);
  for (;;) {
    s.cv.wait(lk, [&] { return !s.open.empty() || s.busy == 0; });
    if (s.open.empty()) return;  // busy == 0: tree exhausted
    if (s.over_caps()) {
      s.capped = true;
      s.open.clear();
      s.cv.notify_all();
      return;
    }

    auto it = std::min_element(s.open.begin(), s.open.end(), node_before);
    BnbNode node = std::move(*it);
    s.open.erase(it);
    ++s.popped;

    if (node.bound >= s.incumbent_obj - s.opts.prune_slack) {
      s.log_node(node, "pruned", "-", node.bound);
      s.cv.notify_all();
      continue;
    }

    ++s.busy;
    lk.unlock();

    Eigen::VectorXd lb = s.p.lb, ub = s.p.ub;
    for (const auto& [var, val] : node.fixings) lb[var] = ub[var] = val;
    const Eigen::VectorXd* warm = node.warm.size() == s.p.n ? &node.warm : nullptr;
    NlpSolution sol = solve_nlp(s.p, s.opts.nlp, warm, &lb, &ub);

    // node outcome, assembled unlocked
    bool fathomed = false;
    bool unresolved = false;
    double child_bound = node.bound;
    Eigen::VectorXd child_warm;
    int branch_var = -1;
    bool have_candidate = false;
    double cand_obj = kInf;
    Eigen::VectorXd cand_x;
    const char* action = "branched";

    if (sol.status == SolveStatus::optimal) {
      child_bound = sol.objective;
      child_warm = sol.x;
      if (all_integral(s.p, sol.x, s.opts.int_tol)) {
        fathomed = true;
        action = "fathomed";
        Eigen::VectorXd snapped = snap_binaries(s.p, sol.x, s.opts.int_tol);
        if (constraint_violation(s.p, snapped) <= s.opts.feas_tol) {
          have_candidate = true;
          cand_obj = eval_objective(s.p, snapped);
          cand_x = snapped;
        } else {
          // re-solve with the assignment clamped before giving up on it
          Eigen::VectorXd flb = s.p.lb, fub = s.p.ub;
          for (int b : s.p.binaries) flb[b] = fub[b] = std::round(sol.x[b]);
          NlpSolution fixed = solve_nlp(s.p, s.opts.nlp, &sol.x, &flb, &fub);
          if (fixed.status == SolveStatus::optimal &&
              constraint_violation(s.p, fixed.x) <= s.opts.feas_tol) {
            have_candidate = true;
            cand_obj = fixed.objective;
            cand_x = fixed.x;
          } else if (fixed.status != SolveStatus::locally_infeasible) {
            unresolved = true;
          }
        }
      } else {
        // fractional: cheap rounding candidate, then branch
        Eigen::VectorXd dhat(static_cast<Eigen::Index>(s.p.binaries.size()));
        for (std::size_t j = 0; j < s.p.binaries.size(); ++j)
          dhat[static_cast<Eigen::Index>(j)] = sol.x[s.p.binaries[j]];
        Eigen::VectorXd rounded = round_relaxed(dhat, s.opts.int_tol);
        Eigen::VectorXd cand = sol.x;
        for (std::size_t j = 0; j < s.p.binaries.size(); ++j)
          cand[s.p.binaries[j]] = rounded[static_cast<Eigen::Index>(j)];
        if (constraint_violation(s.p, cand) <= s.opts.feas_tol) {
          have_candidate = true;
          cand_obj = eval_objective(s.p, cand);
          cand_x = cand;
        }
        std::vector<int> unfixed;
        for (int b : s.p.binaries)
          if (!node.fixings.count(b)) unfixed.push_back(b);
        int pos = select_branch_variable(sol.x, unfixed, s.opts.int_tol);
        branch_var = pos >= 0 ? unfixed[pos] : -1;
        if (branch_var < 0) {
          // fractionality sits only on already-fixed variables: numerically
          // impossible (fixed vars are exact), treat as unresolved
          fathomed = true;
          unresolved = true;
          action = "fathomed";
        }
      }
    } else {
      // infeasible or failed relaxation: distrust and dive unless fully fixed
      child_warm = node.warm;
      branch_var = lowest_unfixed(s.p, node.fixings);
      if (node.depth >= nb || branch_var < 0) {
        fathomed = true;
        action = "fathomed";
        if (sol.status != SolveStatus::locally_infeasible) unresolved = true;
      }
    }

    lk.lock();
    --s.busy;
    if (have_candidate) s.offer_incumbent(cand_obj, cand_x);
    if (unresolved) s.exhaustive = false;
    if (!fathomed && branch_var >= 0 && !s.capped) {
      for (int val : {0, 1}) {
        BnbNode child;
        child.fixings = node.fixings;
        child.fixings[branch_var] = val;
        child.bound = child_bound;
        child.warm = child_warm;
        child.depth = node.depth + 1;
        child.seq = s.next_seq++;
        s.open.push_back(std::move(child));
      }
    }
    if (have_candidate && action[0] == 'f') action = "incumbent";
    s.log_node(node, action, to_string(sol.status), sol.objective);
    s.cv.notify_all();
  }
}

}  // namespace

const char* to_string(MinlpStatus s) {
  switch (s) {
    case MinlpStatus::optimal_within_tree: return "optimal_within_tree";
    case MinlpStatus::feasible: return "feasible";
    case MinlpStatus::infeasible: return "infeasible";
    case MinlpStatus::node_limit: return "node_limit";
  }
  return "?";
}

int select_branch_variable(const Eigen::VectorXd& x, const std::vector<int>& marks,
                           double int_tol) {
  int best = -1;
  double best_dist = int_tol;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    double v = x[marks[i]];
    double dist = std::abs(v - std::round(v));
    if (dist > best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

MinlpSolution solve_bnb(const NlpProblem& p, const BnbOptions& opts,
                        const Eigen::VectorXd* x0) {
  Search s(p, opts);
  BnbNode root;
  root.seq = s.next_seq++;
  if (x0) root.warm = *x0;
  s.open.push_back(std::move(root));

  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    worker(s);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back([&s] { worker(s); });
    for (auto& t : pool) t.join();
  }

  MinlpSolution out;
  out.node_count = s.popped;
  out.incumbent_history = std::move(s.history);
  if (std::isfinite(s.incumbent_obj)) {
    out.x = std::move(s.incumbent_x);
    out.binary_values = std::move(s.incumbent_bins);
    out.objective = s.incumbent_obj;
    out.status = s.capped ? MinlpStatus::node_limit
                          : (s.exhaustive ? MinlpStatus::optimal_within_tree
                                          : MinlpStatus::feasible);
  } else {
    out.status = s.capped ? MinlpStatus::node_limit : MinlpStatus::infeasible;
  }
  return out;
}

MinlpSolution enumerate_exhaustive(const NlpProblem& p, const BnbOptions& opts, int cap,
                                   const Eigen::VectorXd* x0) {
  const int nb = static_cast<int>(p.binaries.size());
  if (nb > cap)
    throw std::invalid_argument("enumerate_exhaustive: too many binaries for the cap");

  MinlpSolution out;
  out.node_count = 1 << nb;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << nb); ++a) {
    Eigen::VectorXd lb = p.lb, ub = p.ub;
    for (int j = 0; j < nb; ++j) {
      double val = static_cast<double>((a >> j) & 1u);
      lb[p.binaries[static_cast<std::size_t>(j)]] = val;
      ub[p.binaries[static_cast<std::size_t>(j)]] = val;
    }
    NlpSolution sol = solve_nlp(p, opts.nlp, x0, &lb, &ub);
    if (sol.status != SolveStatus::optimal) continue;
    if (constraint_violation(p, sol.x) > opts.feas_tol) continue;
    if (sol.objective < out.objective) {
      out.objective = sol.objective;
      out.x = sol.x;
      out.binary_values.resize(nb);
      for (int j = 0; j < nb; ++j)
        out.binary_values[j] = std::round(sol.x[p.binaries[static_cast<std::size_t>(j)]]);
      out.incumbent_history.push_back(sol.objective);
    }
  }
  out.status = std::isfinite(out.objective) ? MinlpStatus::optimal_within_tree
                                            : MinlpStatus::infeasible;
  return out;
}

}  // namespace trigopt
