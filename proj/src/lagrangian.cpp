#include "srusk/lagrangian.hpp"

#include <Eigen/SVD>

#include "srusk/errors.hpp"

namespace srusk {

LagrangianSystem::LagrangianSystem(int n_, ScalarField L_, std::string name_)
    : n(n_), L(std::move(L_)), name(std::move(name_)) {
  if (n < 1) throw EngineError("LagrangianSystem needs n >= 1");
  if (L.arity() != 2 * n + 1)
    throw EngineError("Lagrangian arity must be 2n+1 for argument order (t, q, v)");
  dLdv_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dLdv_.push_back(L.partial(1 + n + i));
}

Eigen::VectorXd pack_tqv(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  Eigen::VectorXd x(1 + q.size() + v.size());
  x[0] = t;
  x.segment(1, q.size()) = q;
  x.segment(1 + q.size(), v.size()) = v;
  return x;
}

namespace {

void check_sizes(const LagrangianSystem& sys, const Eigen::VectorXd& q,
                 const Eigen::VectorXd& v) {
  if (q.size() != sys.n || v.size() != sys.n)
    throw EngineError("q/v size does not match system dimension");
}

}  // namespace

Eigen::VectorXd legendre_restricted(const LagrangianSystem& sys, double t,
                                    const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  check_sizes(sys, q, v);
  const Jet1 j = sys.L.jet1(pack_tqv(t, q, v));
  return j.gradient.segment(1 + sys.n, sys.n);
}

ExtendedMomenta legendre_extended(const LagrangianSystem& sys, double t,
                                  const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  check_sizes(sys, q, v);
  const Jet1 j = sys.L.jet1(pack_tqv(t, q, v));
  ExtendedMomenta em;
  em.p = j.gradient.segment(1 + sys.n, sys.n);
  em.p_energy = j.value - v.dot(em.p);
  return em;
}

Eigen::MatrixXd velocity_hessian(const LagrangianSystem& sys, double t,
                                 const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  check_sizes(sys, q, v);
  const Jet2 j = sys.L.jet2(pack_tqv(t, q, v));
  return j.hessian.block(1 + sys.n, 1 + sys.n, sys.n, sys.n);
}

RegularityReport regularity(const LagrangianSystem& sys, double t, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& v, double rank_tol) {
  if (rank_tol <= 0.0) throw EngineError("rank_tol must be positive");
  const Eigen::MatrixXd W = velocity_hessian(sys, t, q, v);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeFullV);

  RegularityReport rep;
  rep.singular_values = svd.singularValues();
  rep.tolerance_used = rank_tol;
  const double smax = rep.singular_values.size() ? rep.singular_values[0] : 0.0;
  for (int i = 0; i < rep.singular_values.size(); ++i) {
    const bool in_kernel = (smax == 0.0) || (rep.singular_values[i] < rank_tol * smax);
    if (in_kernel) rep.kernel_basis.push_back(svd.matrixV().col(i));
  }
  rep.classification = rep.kernel_basis.empty() ? Regularity::Regular : Regularity::Singular;
  return rep;
}

Eigen::VectorXd euler_lagrange_residual(const LagrangianSystem& sys, double t,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                                        const Eigen::VectorXd& a) {
  check_sizes(sys, q, v);
  if (a.size() != sys.n) throw EngineError("acceleration size does not match system dimension");
  const int n = sys.n;
  const Jet2 j = sys.L.jet2(pack_tqv(t, q, v));
  const auto W = j.hessian.block(1 + n, 1 + n, n, n);
  const auto Lqv = j.hessian.block(1, 1 + n, n, n);      // (j, i) = d2L/dq^j dv^i
  const auto Ltv = j.hessian.block(0, 1 + n, 1, n);
  const auto Lq = j.gradient.segment(1, n);
  return W * a + Lqv.transpose() * v + Ltv.transpose() - Lq;
}

Eigen::VectorXd legendre_invert(const LagrangianSystem& sys, double t, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& p, const Eigen::VectorXd& v_guess,
                                double newton_tol, int max_iter) {
  check_sizes(sys, q, v_guess);
  if (p.size() != sys.n) throw EngineError("p size does not match system dimension");

  Eigen::VectorXd v = v_guess;
  Eigen::VectorXd r = legendre_restricted(sys, t, q, v) - p;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (r.lpNorm<Eigen::Infinity>() <= newton_tol) return v;

    const Eigen::MatrixXd W = velocity_hessian(sys, t, q, v);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()[0];
    const double smin = svd.singularValues()[sys.n - 1];
    if (smax == 0.0 || smin < 1e-12 * smax)
      throw SingularJacobian("legendre_invert: velocity Hessian is rank deficient");
    const Eigen::VectorXd step = svd.solve(-r);

    // Halve the step while the residual grows.
    double alpha = 1.0;
    Eigen::VectorXd v_next, r_next;
    for (int halving = 0; halving < 40; ++halving) {
      v_next = v + alpha * step;
      r_next = legendre_restricted(sys, t, q, v_next) - p;
      if (r_next.norm() <= r.norm() || alpha < 1e-12) break;
      alpha *= 0.5;
    }
    v = v_next;
    r = r_next;
  }
  if (r.lpNorm<Eigen::Infinity>() <= newton_tol) return v;
  throw NoConvergence("legendre_invert: no convergence after max_iter iterations");
}

double hamiltonian(const LagrangianSystem& sys, double t, const Eigen::VectorXd& q,
                   const Eigen::VectorXd& p, const Eigen::VectorXd& v_guess, double newton_tol,
                   int max_iter) {
  const Eigen::VectorXd v = legendre_invert(sys, t, q, p, v_guess, newton_tol, max_iter);
  return p.dot(v) - sys.L.value(pack_tqv(t, q, v));
}

HamiltonianGradient hamiltonian_with_gradient(const LagrangianSystem& sys, double t,
                                              const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                              const Eigen::VectorXd& v_guess, double newton_tol,
                                              int max_iter) {
  HamiltonianGradient hg;
  hg.v = legendre_invert(sys, t, q, p, v_guess, newton_tol, max_iter);
  const Jet1 j = sys.L.jet1(pack_tqv(t, q, hg.v));
  hg.value = p.dot(hg.v) - j.value;
  hg.dH_dq = -j.gradient.segment(1, sys.n);
  hg.dH_dp = hg.v;
  return hg;
}

}  // namespace srusk
