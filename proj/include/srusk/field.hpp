#ifndef SRUSK_FIELD_HPP
#define SRUSK_FIELD_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "srusk/expr.hpp"

namespace srusk {

struct Jet1 {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// Value, gradient and Hessian of a scalar field at a point.  The Hessian is
// symmetric by construction (bitwise).
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// A smooth scalar field of fixed arity, backed by an expression DAG.
// Evaluation and differentiation are pure and thread-safe; the tape is
// immutable after construction.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int arity, Expr body)
      : arity_(arity), body_(std::move(body)),
        tape_(std::make_shared<Tape>(body_)) {
    if (arity_ < 1) throw EngineError("scalar field arity must be positive");
    if (tape_->max_var() >= arity_)
      throw EngineError("scalar field body uses a variable beyond its arity");
  }

  int arity() const { return arity_; }
  const Expr& body() const { return body_; }
  bool valid() const { return tape_ != nullptr; }

  double value(const Eigen::VectorXd& x) const {
    check(x);
    std::vector<double> xs(x.data(), x.data() + x.size());
    return tape_->eval<double>(xs);
  }

  Jet1 jet1(const Eigen::VectorXd& x) const {
    check(x);
    const int m = arity_;
    std::vector<Dual1> xs;
    xs.reserve(m);
    for (int i = 0; i < m; ++i) xs.push_back(Dual1::variable(x[i], m, i));
    Dual1 r = tape_->eval<Dual1>(xs);
    return {r.v, std::move(r.g)};
  }

  Jet2 jet2(const Eigen::VectorXd& x) const {
    check(x);
    const int m = arity_;
    std::vector<Dual2> xs;
    xs.reserve(m);
    for (int i = 0; i < m; ++i) xs.push_back(Dual2::variable(x[i], m, i));
    Dual2 r = tape_->eval<Dual2>(xs);
    return {r.v, std::move(r.g), std::move(r.h)};
  }

  double directional(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    check(x);
    if (d.size() != arity_) throw EngineError("direction size does not match arity");
    std::vector<DirDual> xs;
    xs.reserve(arity_);
    for (int i = 0; i < arity_; ++i) xs.emplace_back(x[i], d[i]);
    return tape_->eval<DirDual>(xs).d;
  }

  // Symbolic partial derivative, same arity.
  ScalarField partial(int var) const {
    return ScalarField(arity_, derivative(body_, var));
  }

 private:
  void check(const Eigen::VectorXd& x) const {
    if (!tape_) throw EngineError("empty scalar field");
    if (x.size() != arity_) throw EngineError("point size does not match field arity");
  }

  int arity_ = 0;
  Expr body_;
  std::shared_ptr<const Tape> tape_;
};

inline Jet2 jet2(const ScalarField& f, const Eigen::VectorXd& x) { return f.jet2(x); }

inline double directional_derivative(const ScalarField& f, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& d) {
  return f.directional(x, d);
}

}  // namespace srusk

#endif
