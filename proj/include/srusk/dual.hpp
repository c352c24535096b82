#ifndef SRUSK_DUAL_HPP
#define SRUSK_DUAL_HPP

#include <Eigen/Dense>
#include <cassert>
#include <cmath>

#include "srusk/errors.hpp"

// Generalized dual numbers for forward-mode differentiation.
//
//   DirDual  carries one directional derivative,
//   Dual1    carries a full gradient over m seeded variables,
//   Dual2    carries gradient and Hessian over m seeded variables.
//
// A function composed of the arithmetic operators and the elementary
// functions below, evaluated on seeded duals, yields derivatives that are
// exact up to roundoff.  The Dual2 Hessian is filled symmetrically
// (lower triangle computed, upper mirrored), so H(i,j) == H(j,i) bitwise.

namespace srusk {

// ---------------------------------------------------------------------
// DirDual: value + one directional derivative
// ---------------------------------------------------------------------

struct DirDual {
  double v = 0.0;
  double d = 0.0;

  DirDual() = default;
  DirDual(double value, double deriv) : v(value), d(deriv) {}
};

inline DirDual operator+(const DirDual& a, const DirDual& b) { return {a.v + b.v, a.d + b.d}; }
inline DirDual operator-(const DirDual& a, const DirDual& b) { return {a.v - b.v, a.d - b.d}; }
inline DirDual operator-(const DirDual& a) { return {-a.v, -a.d}; }
inline DirDual operator*(const DirDual& a, const DirDual& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
inline DirDual operator/(const DirDual& a, const DirDual& b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

// ---------------------------------------------------------------------
// Dual1: value + gradient over m variables
// ---------------------------------------------------------------------

struct Dual1 {
  double v = 0.0;
  Eigen::VectorXd g;

  Dual1() = default;
  Dual1(double value, Eigen::VectorXd grad) : v(value), g(std::move(grad)) {}

  static Dual1 constant(double value, int m) { return {value, Eigen::VectorXd::Zero(m)}; }
  static Dual1 variable(double value, int m, int index) {
    Dual1 r = constant(value, m);
    r.g[index] = 1.0;
    return r;
  }
};

inline Dual1 operator+(const Dual1& a, const Dual1& b) { return {a.v + b.v, a.g + b.g}; }
inline Dual1 operator-(const Dual1& a, const Dual1& b) { return {a.v - b.v, a.g - b.g}; }
inline Dual1 operator-(const Dual1& a) { return {-a.v, -a.g}; }
inline Dual1 operator*(const Dual1& a, const Dual1& b) {
  return {a.v * b.v, b.v * a.g + a.v * b.g};
}
inline Dual1 operator/(const Dual1& a, const Dual1& b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  const double r = a.v / b.v;
  return {r, (a.g - r * b.g) / b.v};
}

// ---------------------------------------------------------------------
// Dual2: value + gradient + symmetric Hessian over m variables
// ---------------------------------------------------------------------

struct Dual2 {
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;

  Dual2() = default;
  Dual2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : v(value), g(std::move(grad)), h(std::move(hess)) {}

  static Dual2 constant(double value, int m) {
    return {value, Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m)};
  }
  static Dual2 variable(double value, int m, int index) {
    Dual2 r = constant(value, m);
    r.g[index] = 1.0;
    return r;
  }
};

namespace detail {

// h(i,j) = s1*a(i,j) + s2*b(i,j), mirrored so the result is bitwise symmetric.
inline Eigen::MatrixXd sym_combine(double s1, const Eigen::MatrixXd& a, double s2,
                                   const Eigen::MatrixXd& b) {
  const Eigen::Index m = a.rows();
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double t = s1 * a(i, j) + s2 * b(i, j);
      h(i, j) = t;
      h(j, i) = t;
    }
  return h;
}

// h += x*y' + y*x', symmetric fill.
inline void sym_rank2(Eigen::MatrixXd& h, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index m = h.rows();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double t = h(i, j) + (x[i] * y[j] + y[i] * x[j]);
      h(i, j) = t;
      h(j, i) = t;
    }
}

// Chain rule for a unary elementary function: h = d1*x.h + d2*(x.g x.g').
inline Eigen::MatrixXd sym_chain(double d1, const Eigen::MatrixXd& xh, double d2,
                                 const Eigen::VectorXd& xg) {
  const Eigen::Index m = xh.rows();
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double t = d1 * xh(i, j) + d2 * (xg[i] * xg[j]);
      h(i, j) = t;
      h(j, i) = t;
    }
  return h;
}

}  // namespace detail

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v, a.g + b.g, detail::sym_combine(1.0, a.h, 1.0, b.h)};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v, a.g - b.g, detail::sym_combine(1.0, a.h, -1.0, b.h)};
}
inline Dual2 operator-(const Dual2& a) {
  return {-a.v, -a.g, detail::sym_combine(-1.0, a.h, 0.0, a.h)};
}
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  Eigen::MatrixXd h = detail::sym_combine(b.v, a.h, a.v, b.h);
  detail::sym_rank2(h, a.g, b.g);
  return {a.v * b.v, b.v * a.g + a.v * b.g, std::move(h)};
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  const double r = a.v / b.v;
  Eigen::VectorXd g = (a.g - r * b.g) / b.v;
  // From r*b = a:  a.h = r.h*b.v + b.h*r + r.g b.g' + b.g r.g'
  Eigen::MatrixXd h = detail::sym_combine(1.0 / b.v, a.h, -r / b.v, b.h);
  detail::sym_rank2(h, g * (-1.0 / b.v), b.g);
  return {r, std::move(g), std::move(h)};
}

// ---------------------------------------------------------------------
// Elementary functions (overloads for double and all dual types)
// ---------------------------------------------------------------------

inline double ad_exp(double x) { return std::exp(x); }
inline double ad_log(double x) {
  if (x <= 0.0) throw DomainError("log of a nonpositive value");
  return std::log(x);
}
inline double ad_sin(double x) { return std::sin(x); }
inline double ad_cos(double x) { return std::cos(x); }
inline double ad_tanh(double x) { return std::tanh(x); }
inline double ad_sqrt(double x) {
  if (x < 0.0) throw DomainError("sqrt of a negative value");
  return std::sqrt(x);
}
inline double ad_pow_int(double x, long long k) {
  if (k < 0 && x == 0.0) throw DomainError("negative power of zero");
  return std::pow(x, static_cast<double>(k));
}
inline double ad_pow_real(double x, double a) {
  if (x <= 0.0) throw DomainError("real power of a nonpositive base");
  return std::pow(x, a);
}

inline DirDual ad_exp(const DirDual& x) {
  const double e = std::exp(x.v);
  return {e, x.d * e};
}
inline DirDual ad_log(const DirDual& x) {
  if (x.v <= 0.0) throw DomainError("log of a nonpositive value");
  return {std::log(x.v), x.d / x.v};
}
inline DirDual ad_sin(const DirDual& x) { return {std::sin(x.v), x.d * std::cos(x.v)}; }
inline DirDual ad_cos(const DirDual& x) { return {std::cos(x.v), -x.d * std::sin(x.v)}; }
inline DirDual ad_tanh(const DirDual& x) {
  const double t = std::tanh(x.v);
  return {t, x.d * (1.0 - t * t)};
}
inline DirDual ad_sqrt(const DirDual& x) {
  if (x.v <= 0.0) throw DomainError("sqrt of a nonpositive value");
  const double s = std::sqrt(x.v);
  return {s, x.d * 0.5 / s};
}
inline DirDual ad_pow_int(const DirDual& x, long long k) {
  if (k == 0) return {1.0, 0.0};
  if (x.v == 0.0 && k < 0) throw DomainError("negative power of zero");
  const double p1 = std::pow(x.v, static_cast<double>(k - 1));
  return {p1 * x.v, x.d * static_cast<double>(k) * p1};
}
inline DirDual ad_pow_real(const DirDual& x, double a) {
  if (x.v <= 0.0) throw DomainError("real power of a nonpositive base");
  const double p = std::pow(x.v, a);
  return {p, x.d * a * p / x.v};
}

inline Dual1 ad_exp(const Dual1& x) {
  const double e = std::exp(x.v);
  return {e, e * x.g};
}
inline Dual1 ad_log(const Dual1& x) {
  if (x.v <= 0.0) throw DomainError("log of a nonpositive value");
  return {std::log(x.v), x.g / x.v};
}
inline Dual1 ad_sin(const Dual1& x) { return {std::sin(x.v), std::cos(x.v) * x.g}; }
inline Dual1 ad_cos(const Dual1& x) { return {std::cos(x.v), -std::sin(x.v) * x.g}; }
inline Dual1 ad_tanh(const Dual1& x) {
  const double t = std::tanh(x.v);
  return {t, (1.0 - t * t) * x.g};
}
inline Dual1 ad_sqrt(const Dual1& x) {
  if (x.v <= 0.0) throw DomainError("sqrt of a nonpositive value");
  const double s = std::sqrt(x.v);
  return {s, (0.5 / s) * x.g};
}
inline Dual1 ad_pow_int(const Dual1& x, long long k) {
  if (k == 0) return Dual1::constant(1.0, static_cast<int>(x.g.size()));
  if (x.v == 0.0 && k < 0) throw DomainError("negative power of zero");
  const double p1 = std::pow(x.v, static_cast<double>(k - 1));
  return {p1 * x.v, static_cast<double>(k) * p1 * x.g};
}
inline Dual1 ad_pow_real(const Dual1& x, double a) {
  if (x.v <= 0.0) throw DomainError("real power of a nonpositive base");
  const double p = std::pow(x.v, a);
  return {p, (a * p / x.v) * x.g};
}

namespace detail {
inline Dual2 unary2(const Dual2& x, double f, double d1, double d2) {
  return {f, d1 * x.g, sym_chain(d1, x.h, d2, x.g)};
}
}  // namespace detail

inline Dual2 ad_exp(const Dual2& x) {
  const double e = std::exp(x.v);
  return detail::unary2(x, e, e, e);
}
inline Dual2 ad_log(const Dual2& x) {
  if (x.v <= 0.0) throw DomainError("log of a nonpositive value");
  return detail::unary2(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
inline Dual2 ad_sin(const Dual2& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return detail::unary2(x, s, c, -s);
}
inline Dual2 ad_cos(const Dual2& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return detail::unary2(x, c, -s, -c);
}
inline Dual2 ad_tanh(const Dual2& x) {
  const double t = std::tanh(x.v), s = 1.0 - t * t;
  return detail::unary2(x, t, s, -2.0 * t * s);
}
inline Dual2 ad_sqrt(const Dual2& x) {
  if (x.v <= 0.0) throw DomainError("sqrt of a nonpositive value");
  const double s = std::sqrt(x.v);
  return detail::unary2(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline Dual2 ad_pow_int(const Dual2& x, long long k) {
  if (k == 0) return Dual2::constant(1.0, static_cast<int>(x.g.size()));
  if (x.v == 0.0 && k < 0) throw DomainError("negative power of zero");
  const double kk = static_cast<double>(k);
  const double p2 = std::pow(x.v, kk - 2.0);
  const double p1 = (k == 1) ? 1.0 : p2 * x.v;
  return detail::unary2(x, p1 * x.v, kk * p1, (k == 1) ? 0.0 : kk * (kk - 1.0) * p2);
}
inline Dual2 ad_pow_real(const Dual2& x, double a) {
  if (x.v <= 0.0) throw DomainError("real power of a nonpositive base");
  const double p = std::pow(x.v, a);
  return detail::unary2(x, p, a * p / x.v, a * (a - 1.0) * p / (x.v * x.v));
}

// Division with the domain check on every scalar type.
inline double ad_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}
inline DirDual ad_div(const DirDual& a, const DirDual& b) { return a / b; }
inline Dual1 ad_div(const Dual1& a, const Dual1& b) { return a / b; }
inline Dual2 ad_div(const Dual2& a, const Dual2& b) { return a / b; }

// Constants shaped like an existing scalar (duals need the right width).
inline double ad_const_like(double c, double) { return c; }
inline DirDual ad_const_like(double c, const DirDual&) { return {c, 0.0}; }
inline Dual1 ad_const_like(double c, const Dual1& proto) {
  return Dual1::constant(c, static_cast<int>(proto.g.size()));
}
inline Dual2 ad_const_like(double c, const Dual2& proto) {
  return Dual2::constant(c, static_cast<int>(proto.g.size()));
}

}  // namespace srusk

#endif
