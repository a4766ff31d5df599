// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Scalar expression graph used to state objectives and constraints.
// Nodes form an immutable DAG; building is cheap and thread-safe, and
// problems holding Expr roots can be shared across threads read-only.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trigopt {

enum class Op : std::uint8_t {
  Const,
  Var,
  Sum,    // bias + sum_i coeff[i] * arg[i]
  Mul,    // arg[0] * arg[1]
  Pow,    // arg[0] ^ exponent (exponent is a literal)
  Neg,
  Sin,
  Cos,
  Tan,
  Exp,
  Sqrt,
  SumSq,  // sum_i arg[i]^2
  Norm,   // sqrt(sum_i arg[i]^2), derivative guarded away from zero
};

class Expr;
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;  // Const payload or Pow exponent
  int var = -1;
  double bias = 0.0;               // Sum only
  std::vector<NodePtr> args;
  std::vector<double> coeffs;      // Sum only, one per arg
  std::uint64_t id = 0;            // unique, increasing with creation order
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Guard radius below which Norm derivatives are refused.
inline constexpr double kNormGuard = 1e-9;
// tan(x) raises DomainError when |cos(x)| falls below this (pole proximity).
inline constexpr double kTanGuard = 1e-12;

class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr n) : node_(std::move(n)) {}

  static Expr constant(double v);
  static Expr variable(int index);

  const ExprNode& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  bool valid() const { return node_ != nullptr; }
  bool is_const() const { return node_ && node_->op == Op::Const; }
  double const_value() const { return node_->value; }

  // Variable indices referenced by this expression, sorted ascending.
  std::vector<int> support() const;

 private:
  NodePtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator*(double c, const Expr& a);
inline Expr operator*(const Expr& a, double c) { return c * a; }
Expr operator+(const Expr& a, double c);
inline Expr operator+(double c, const Expr& a) { return a + c; }
inline Expr operator-(const Expr& a, double c) { return a + (-c); }
inline Expr operator-(double c, const Expr& a) { return (-a) + c; }
Expr operator/(const Expr& a, const Expr& b);
inline Expr operator/(const Expr& a, double c) { return (1.0 / c) * a; }
inline Expr operator/(double c, const Expr& a) { return Expr::constant(c) / a; }

Expr pow(const Expr& a, double exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);
Expr square(const Expr& a);
Expr sum_sq(std::span<const Expr> parts);
Expr norm2(std::span<const Expr> parts);
inline Expr sum_sq(std::initializer_list<Expr> parts) {
  return sum_sq(std::span<const Expr>(parts.begin(), parts.size()));
}
inline Expr norm2(std::initializer_list<Expr> parts) {
  return norm2(std::span<const Expr>(parts.begin(), parts.size()));
}

// Weighted sum: bias + sum_i coeffs[i] * parts[i].
Expr affine(std::span<const Expr> parts, std::span<const double> coeffs, double bias);
inline Expr affine(std::initializer_list<Expr> parts, std::initializer_list<double> coeffs,
                   double bias) {
  return affine(std::span<const Expr>(parts.begin(), parts.size()),
                std::span<const double>(coeffs.begin(), coeffs.size()), bias);
}

// Plain recursive evaluation at a full-length point x (indexed by variable id).
// Throws DomainError for sqrt of a negative argument; Norm values are defined
// everywhere (only derivatives are guarded).
double eval(const Expr& e, std::span<const double> x);
inline double eval(const Expr& e, std::initializer_list<double> x) {
  return eval(e, std::span<const double>(x.begin(), x.size()));
}

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// Conservative interval enclosure of e over the box [lo, hi] (full-length,
// indexed by variable id). Used to validate big-M constants against bounds.
Interval interval_eval(const Expr& e, std::span<const double> lo, std::span<const double> hi);

// Splits a linear combination tree into (weight, root) terms by descending
// through Sum and Neg nodes; other ops stop the descent. The returned bias is
// the accumulated constant part. Used to decompose objectives into small
// separable pieces for Hessian assembly.
struct TermList {
  std::vector<double> weights;
  std::vector<Expr> roots;
  double bias = 0.0;
};
TermList collect_terms(const Expr& e);

}  // namespace trigopt
