#include "srusk/unified.hpp"

#include <Eigen/SVD>

#include "srusk/errors.hpp"

namespace srusk {

Eigen::VectorXd pack_tqvp(const UnifiedPoint& pt) {
  const int n = pt.n();
  Eigen::VectorXd x(3 * n + 1);
  x[0] = pt.t;
  x.segment(1, n) = pt.q;
  x.segment(1 + n, n) = pt.v;
  x.segment(1 + 2 * n, n) = pt.p;
  return x;
}

UnifiedPoint unpack_tqvp(int n, const Eigen::VectorXd& x) {
  if (x.size() != 3 * n + 1) throw EngineError("coordinate vector has wrong length");
  UnifiedPoint pt;
  pt.t = x[0];
  pt.q = x.segment(1, n);
  pt.v = x.segment(1 + n, n);
  pt.p = x.segment(1 + 2 * n, n);
  return pt;
}

ExtendedPoint embed(const LagrangianSystem& sys, const UnifiedPoint& pt) {
  ExtendedPoint e;
  e.t = pt.t;
  e.q = pt.q;
  e.v = pt.v;
  e.p = pt.p;
  e.p_energy = sys.L.value(pack_tqv(pt.t, pt.q, pt.v)) - pt.p.dot(pt.v);
  return e;
}

double coupling(const ExtendedPoint& pt) { return pt.p_energy + pt.p.dot(pt.v); }

double w0_residual(const LagrangianSystem& sys, const ExtendedPoint& pt) {
  return coupling(pt) - sys.L.value(pack_tqv(pt.t, pt.q, pt.v));
}

Theta0 theta0(const LagrangianSystem& sys, const UnifiedPoint& pt) {
  Theta0 th;
  th.dt_coefficient = sys.L.value(pack_tqv(pt.t, pt.q, pt.v)) - pt.p.dot(pt.v);
  th.dq_coefficients = pt.p;
  return th;
}

Eigen::MatrixXd omega0_matrix(const LagrangianSystem& sys, const UnifiedPoint& pt) {
  const int n = pt.n();
  if (n != sys.n) throw EngineError("point dimension does not match system");

  // E = p_i v^i - L as a field on (t, q, v, p).
  Expr e_expr = -sys.L.body();
  for (int i = 0; i < n; ++i)
    e_expr = e_expr + Expr::variable(1 + 2 * n + i) * Expr::variable(1 + n + i);
  const ScalarField E(3 * n + 1, e_expr);
  const Eigen::VectorXd dE = E.jet1(pack_tqvp(pt)).gradient;

  const int dim = 3 * n + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 1; a < dim; ++a) {
    M(a, 0) = dE[a];
    M(0, a) = -dE[a];
  }
  for (int i = 0; i < n; ++i) {
    M(1 + i, 1 + 2 * n + i) += 1.0;        // dq^i row, dp_i column
    M(1 + 2 * n + i, 1 + i) -= 1.0;
  }
  return M;
}

Eigen::VectorXd primary_constraints(const LagrangianSystem& sys, const UnifiedPoint& pt) {
  return pt.p - legendre_restricted(sys, pt.t, pt.q, pt.v);
}

VelocityTangency velocity_tangency(const LagrangianSystem& sys, double t,
                                   const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  const int n = sys.n;
  const Eigen::VectorXd x = pack_tqv(t, q, v);
  VelocityTangency vt;
  vt.W.resize(n, n);
  vt.b.resize(n);

  // Row j of (W | b) comes from the gradient of the cached dL/dv^j; this
  // avoids a full second-order sweep of L.
  const Jet1 jL = sys.L.jet1(x);
  vt.H = jL.gradient.segment(1, n);
  for (int j = 0; j < n; ++j) {
    const Jet1 jr = sys.dLdv(j).jet1(x);
    vt.W.row(j) = jr.gradient.segment(1 + n, n);
    vt.b[j] = vt.H[j] - jr.gradient[0] - jr.gradient.segment(1, n).dot(v);
  }
  return vt;
}

VectorFieldSolution solve_vector_field(const LagrangianSystem& sys, const UnifiedPoint& pt,
                                       double rank_tol) {
  const Eigen::VectorXd phi = primary_constraints(sys, pt);
  if (phi.lpNorm<Eigen::Infinity>() > kOnManifoldTol)
    throw NotOnW1("solve_vector_field: point violates the primary constraints");

  const VelocityTangency vt = velocity_tangency(sys, pt.t, pt.q, pt.v);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vt.W, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(rank_tol);

  VectorFieldSolution sol;
  sol.F = pt.v;
  sol.H = vt.H;
  sol.G_particular = svd.solve(vt.b);
  sol.consistency_defect = (vt.W * sol.G_particular - vt.b).norm();

  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  for (int i = 0; i < sv.size(); ++i)
    if (smax == 0.0 || sv[i] < rank_tol * smax) sol.G_kernel.push_back(svd.matrixV().col(i));
  return sol;
}

}  // namespace srusk
