#ifndef SRUSK_TESTS_HELPERS_HPP
#define SRUSK_TESTS_HELPERS_HPP

#include <random>

#include "srusk/field.hpp"
#include "srusk/unified.hpp"

namespace srusk::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::VectorXd random_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

// Random box point in (t, q, v, p); p is arbitrary unless projected later.
inline UnifiedPoint random_point(Rng& rng, int n) {
  UnifiedPoint pt;
  pt.t = uniform(rng, 0.0, 1.0);
  pt.q = random_vector(rng, n);
  pt.v = random_vector(rng, n);
  pt.p = random_vector(rng, n);
  return pt;
}

inline std::vector<UnifiedPoint> random_points(Rng& rng, int n, int count) {
  std::vector<UnifiedPoint> pts;
  for (int i = 0; i < count; ++i) pts.push_back(random_point(rng, n));
  return pts;
}

// Point on the primary constraint set: p is the Legendre image.
inline UnifiedPoint random_w1_point(Rng& rng, const LagrangianSystem& sys) {
  UnifiedPoint pt = random_point(rng, sys.n);
  pt.p = legendre_restricted(sys, pt.t, pt.q, pt.v);
  return pt;
}

// Random smooth expression over m variables, bounded on [-1,1]^m and domain
// safe for every elementary function it contains.
inline Expr random_expr(Rng& rng, int m, int depth) {
  std::uniform_int_distribution<int> pick_leaf(0, 2);
  if (depth == 0) {
    if (pick_leaf(rng) == 0) return Expr(uniform(rng, -2.0, 2.0));
    return Expr::variable(std::uniform_int_distribution<int>(0, m - 1)(rng));
  }
  std::uniform_int_distribution<int> pick_op(0, 10);
  const Expr a = random_expr(rng, m, depth - 1);
  switch (pick_op(rng)) {
    case 0:
      return a + random_expr(rng, m, depth - 1);
    case 1:
      return a - random_expr(rng, m, depth - 1);
    case 2:
      return a * random_expr(rng, m, depth - 1);
    case 3: {
      const Expr b = random_expr(rng, m, depth - 1);
      return a / (1.5 + b * b);
    }
    case 4:
      return exp(tanh(a));
    case 5:
      return log(1.1 + a * a);
    case 6:
      return sin(a);
    case 7:
      return cos(a);
    case 8:
      return tanh(a);
    case 9:
      return sqrt(0.1 + a * a);
    default:
      return powi(tanh(a), 3);
  }
}

inline Eigen::VectorXd fd_gradient(const ScalarField& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f.value(xp) - f.value(xm)) / (2.0 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const ScalarField& f, const Eigen::VectorXd& x, double h) {
  const int m = static_cast<int>(x.size());
  Eigen::MatrixXd H(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h;
      xpp[j] += h;
      xpm[i] += h;
      xpm[j] -= h;
      xmp[i] -= h;
      xmp[j] += h;
      xmm[i] -= h;
      xmm[j] -= h;
      H(i, j) = (f.value(xpp) - f.value(xpm) - f.value(xmp) + f.value(xmm)) / (4.0 * h * h);
    }
  return H;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace srusk::testing

#endif
