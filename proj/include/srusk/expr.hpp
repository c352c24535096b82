#ifndef SRUSK_EXPR_HPP
#define SRUSK_EXPR_HPP

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "srusk/dual.hpp"

// Expression DAGs over a fixed elementary function set
// (+, -, *, /, powers, exp, log, sin, cos, tanh, sqrt).
//
// An Expr is an immutable shared tree with constant folding and zero/one
// pruning at construction.  It can be differentiated symbolically
// (`derivative`), composed (`substitute`), and flattened to a Tape that is
// interpreted over double or any of the dual scalar types.  Discovered
// constraint functions are built this way, which keeps them differentiable
// to whatever order later stages of the constraint algorithm need.

namespace srusk {

enum class OpKind {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  PowInt,
  PowReal,
  Exp,
  Log,
  Sin,
  Cos,
  Tanh,
  Sqrt
};

struct ExprNode {
  OpKind kind;
  double value = 0.0;   // Const
  int var = -1;         // Var
  long long ipow = 0;   // PowInt exponent
  double rpow = 0.0;    // PowReal exponent
  std::shared_ptr<const ExprNode> a;
  std::shared_ptr<const ExprNode> b;
};

class Expr {
 public:
  Expr() : Expr(0.0) {}
  /*implicit*/ Expr(double c) { ptr_ = make_const(c); }
  /*implicit*/ Expr(int c) : Expr(static_cast<double>(c)) {}

  static Expr variable(int index) {
    auto n = std::make_shared<ExprNode>();
    n->kind = OpKind::Var;
    n->var = index;
    return Expr(std::move(n));
  }

  const ExprNode* node() const { return ptr_.get(); }
  const std::shared_ptr<const ExprNode>& shared() const { return ptr_; }

  bool is_const() const { return ptr_->kind == OpKind::Const; }
  bool is_const(double c) const { return is_const() && ptr_->value == c; }
  double const_value() const { return ptr_->value; }

  // Highest variable index appearing in the expression, -1 if none.
  int max_var() const;

  std::string to_string() const;

  explicit Expr(std::shared_ptr<const ExprNode> p) : ptr_(std::move(p)) {}

 private:
  static std::shared_ptr<const ExprNode> make_const(double c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = OpKind::Const;
    n->value = c;
    return n;
  }

  std::shared_ptr<const ExprNode> ptr_;
};

namespace detail {
inline Expr make_unary(OpKind k, const Expr& a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = a.shared();
  return Expr(std::move(n));
}
inline Expr make_binary(OpKind k, const Expr& a, const Expr& b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = a.shared();
  n->b = b.shared();
  return Expr(std::move(n));
}
}  // namespace detail

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.const_value() + b.const_value());
  if (a.is_const(0.0)) return b;
  if (b.is_const(0.0)) return a;
  return detail::make_binary(OpKind::Add, a, b);
}

inline Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr(-a.const_value());
  if (a.node()->kind == OpKind::Neg) return Expr(a.node()->a);
  return detail::make_unary(OpKind::Neg, a);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.const_value() - b.const_value());
  if (b.is_const(0.0)) return a;
  if (a.is_const(0.0)) return -b;
  if (a.node() == b.node()) return Expr(0.0);
  return detail::make_binary(OpKind::Sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.const_value() * b.const_value());
  if (a.is_const(0.0) || b.is_const(0.0)) return Expr(0.0);
  if (a.is_const(1.0)) return b;
  if (b.is_const(1.0)) return a;
  if (a.is_const(-1.0)) return -b;
  if (b.is_const(-1.0)) return -a;
  return detail::make_binary(OpKind::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const() && b.const_value() != 0.0) {
    if (a.is_const()) return Expr(a.const_value() / b.const_value());
    if (b.const_value() == 1.0) return a;
  }
  if (a.is_const(0.0)) return Expr(0.0);
  return detail::make_binary(OpKind::Div, a, b);
}

inline Expr operator+(const Expr& a, double b) { return a + Expr(b); }
inline Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr(b); }
inline Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr(b); }
inline Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr(b); }
inline Expr operator/(double a, const Expr& b) { return Expr(a) / b; }

inline Expr exp(const Expr& a) {
  if (a.is_const()) return Expr(std::exp(a.const_value()));
  return detail::make_unary(OpKind::Exp, a);
}
inline Expr log(const Expr& a) {
  if (a.is_const()) return Expr(ad_log(a.const_value()));
  return detail::make_unary(OpKind::Log, a);
}
inline Expr sin(const Expr& a) {
  if (a.is_const()) return Expr(std::sin(a.const_value()));
  return detail::make_unary(OpKind::Sin, a);
}
inline Expr cos(const Expr& a) {
  if (a.is_const()) return Expr(std::cos(a.const_value()));
  return detail::make_unary(OpKind::Cos, a);
}
inline Expr tanh(const Expr& a) {
  if (a.is_const()) return Expr(std::tanh(a.const_value()));
  return detail::make_unary(OpKind::Tanh, a);
}
inline Expr sqrt(const Expr& a) {
  if (a.is_const()) return Expr(ad_sqrt(a.const_value()));
  return detail::make_unary(OpKind::Sqrt, a);
}

inline Expr powi(const Expr& a, long long k) {
  if (k == 0) return Expr(1.0);
  if (k == 1) return a;
  if (a.is_const()) return Expr(ad_pow_int(a.const_value(), k));
  auto n = std::make_shared<ExprNode>();
  n->kind = OpKind::PowInt;
  n->ipow = k;
  n->a = a.shared();
  return Expr(std::move(n));
}

inline Expr powr(const Expr& a, double p) {
  if (a.is_const() && a.const_value() > 0.0) return Expr(std::pow(a.const_value(), p));
  auto n = std::make_shared<ExprNode>();
  n->kind = OpKind::PowReal;
  n->rpow = p;
  n->a = a.shared();
  return Expr(std::move(n));
}

// pow with an integer-valued exponent is routed to powi so negative bases work.
inline Expr pow(const Expr& a, double p) {
  const long long k = static_cast<long long>(p);
  if (static_cast<double>(k) == p) return powi(a, k);
  return powr(a, p);
}

// ---------------------------------------------------------------------
// Symbolic differentiation and composition
// ---------------------------------------------------------------------

Expr derivative(const Expr& e, int var);

// Replace variable i by repl[i].  Variables beyond repl.size() are kept.
Expr substitute(const Expr& e, const std::vector<Expr>& repl);

// ---------------------------------------------------------------------
// Tape: a flattened DAG in evaluation order
// ---------------------------------------------------------------------

class Tape {
 public:
  explicit Tape(const Expr& root);

  int max_var() const { return max_var_; }
  std::size_t size() const { return instrs_.size(); }

  template <class S>
  S eval(std::span<const S> x) const {
    std::vector<S> slot(instrs_.size());
    for (std::size_t i = 0; i < instrs_.size(); ++i) {
      const Instr& in = instrs_[i];
      switch (in.kind) {
        case OpKind::Const:
          slot[i] = ad_const_like(in.value, x[0]);
          break;
        case OpKind::Var:
          slot[i] = x[static_cast<std::size_t>(in.var)];
          break;
        case OpKind::Add:
          slot[i] = slot[in.a] + slot[in.b];
          break;
        case OpKind::Sub:
          slot[i] = slot[in.a] - slot[in.b];
          break;
        case OpKind::Mul:
          slot[i] = slot[in.a] * slot[in.b];
          break;
        case OpKind::Div:
          slot[i] = ad_div(slot[in.a], slot[in.b]);
          break;
        case OpKind::Neg:
          slot[i] = -slot[in.a];
          break;
        case OpKind::PowInt:
          slot[i] = ad_pow_int(slot[in.a], in.ipow);
          break;
        case OpKind::PowReal:
          slot[i] = ad_pow_real(slot[in.a], in.rpow);
          break;
        case OpKind::Exp:
          slot[i] = ad_exp(slot[in.a]);
          break;
        case OpKind::Log:
          slot[i] = ad_log(slot[in.a]);
          break;
        case OpKind::Sin:
          slot[i] = ad_sin(slot[in.a]);
          break;
        case OpKind::Cos:
          slot[i] = ad_cos(slot[in.a]);
          break;
        case OpKind::Tanh:
          slot[i] = ad_tanh(slot[in.a]);
          break;
        case OpKind::Sqrt:
          slot[i] = ad_sqrt(slot[in.a]);
          break;
      }
    }
    return slot.back();
  }

 private:
  struct Instr {
    OpKind kind;
    int a = -1;
    int b = -1;
    double value = 0.0;
    int var = -1;
    long long ipow = 0;
    double rpow = 0.0;
  };

  std::vector<Instr> instrs_;
  int max_var_ = -1;
};

}  // namespace srusk

#endif
