// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Flat evaluation tapes compiled from Expr DAGs. A tape evaluates one scalar
// together with its dense gradient and Hessian over the expression's support
// (reverse sweep for first order, forward-over-reverse for second order).
// Tapes are immutable after compile; callers supply scratch workspaces, so a
// tape may be shared by concurrent solves.

#pragma once

#include <span>
#include <vector>

#include "trigopt/expr.hpp"

namespace trigopt {

struct TapeWork {
  std::vector<double> w, wd, b, bd;
  void fit(std::size_t n) {
    if (w.size() < n) {
      w.resize(n);
      wd.resize(n);
      b.resize(n);
      bd.resize(n);
    }
  }
};

class Tape {
 public:
  static Tape compile(const Expr& root);

  // Global variable ids feeding this tape, sorted ascending. Input slot i of
  // the tape corresponds to support()[i].
  const std::vector<int>& support() const { return support_; }
  int nin() const { return static_cast<int>(support_.size()); }
  std::size_t slot_count() const { return nslots_; }

  // x is the full-length point, indexed by global variable id.
  double value(std::span<const double> x, TapeWork& ws) const;
  // g has nin() entries. Returns the value.
  double gradient(std::span<const double> x, TapeWork& ws, double* g) const;
  // h is row-major nin() x nin(), fully filled (symmetric). Returns the value.
  double hessian(std::span<const double> x, TapeWork& ws, double* g, double* h) const;

 private:
  struct Instr {
    Op op;
    int out;
    int a = -1, b = -1;
    double p = 0.0;           // Const value, Pow exponent, Sum bias
    int argpos = 0, nargs = 0;  // n-ary operand range in argslots_/coeffs_
  };

  void load_inputs(std::span<const double> x, TapeWork& ws) const;
  void forward(TapeWork& ws) const;
  void forward_tangent(TapeWork& ws) const;
  void reverse(TapeWork& ws, bool second_order) const;

  std::vector<Instr> code_;
  std::vector<int> argslots_;
  std::vector<double> coeffs_;
  std::vector<int> support_;
  std::size_t nslots_ = 0;
  int out_ = 0;
};

}  // namespace trigopt
