#include "srusk/integrator.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "srusk/errors.hpp"

namespace srusk {

namespace {

// X0 components without the on-manifold membership check; intermediate
// integration stages sit O(step^2) off the constraint set.
struct FieldEval {
  Eigen::VectorXd G;
  Eigen::VectorXd H;
};

FieldEval eval_field(const LagrangianSystem& sys, const ConstraintChain& chain,
                     const UnifiedPoint& pt, double rank_tol) {
  const int n = sys.n;
  const VelocityTangency vt = velocity_tangency(sys, pt.t, pt.q, pt.v);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(vt.W, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(rank_tol);
  Eigen::VectorXd G = svd.solve(vt.b);

  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  std::vector<int> kernel_cols;
  for (int i = 0; i < sv.size(); ++i)
    if (smax == 0.0 || sv[i] < rank_tol * smax) kernel_cols.push_back(i);

  if (!kernel_cols.empty()) {
    // Tangency of the higher constraint levels determines the kernel
    // coefficients; the primary rows contract to zero against the kernel.
    std::vector<const ConstraintFunction*> higher;
    for (const auto* c : chain.all())
      if (c->level >= 2) higher.push_back(c);

    const int kappa = static_cast<int>(kernel_cols.size());
    Eigen::MatrixXd K(n, kappa);
    for (int j = 0; j < kappa; ++j) K.col(j) = svd.matrixV().col(kernel_cols[static_cast<std::size_t>(j)]);

    if (!higher.empty()) {
      const int mh = static_cast<int>(higher.size());
      Eigen::MatrixXd B(mh, kappa);
      Eigen::VectorXd A(mh);
      const Eigen::VectorXd x = pack_tqvp(pt);
      for (int r = 0; r < mh; ++r) {
        const Jet1 j = higher[static_cast<std::size_t>(r)]->f.jet1(x);
        const auto gv = j.gradient.segment(1 + n, n);
        A[r] = j.gradient[0] + j.gradient.segment(1, n).dot(pt.v) +
               j.gradient.segment(1 + 2 * n, n).dot(vt.H) + gv.dot(G);
        B.row(r) = gv.transpose() * K;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
      bsvd.setThreshold(rank_tol);
      const Eigen::VectorXd lambda = bsvd.solve(-A);
      G += K * lambda;
    }
  }
  return {std::move(G), vt.H};
}

Eigen::VectorXd rhs(const LagrangianSystem& sys, const ConstraintChain& chain,
                    const Eigen::VectorXd& x, double rank_tol) {
  const int n = sys.n;
  const UnifiedPoint pt = unpack_tqvp(n, x);
  const FieldEval fe = eval_field(sys, chain, pt, rank_tol);
  Eigen::VectorXd dx(3 * n + 1);
  dx[0] = 1.0;
  dx.segment(1, n) = pt.v;
  dx.segment(1 + n, n) = fe.G;
  dx.segment(1 + 2 * n, n) = fe.H;
  return dx;
}

}  // namespace

Eigen::VectorXd resolve_acceleration(const LagrangianSystem& sys, const ConstraintChain& chain,
                                     const UnifiedPoint& pt, double rank_tol) {
  return eval_field(sys, chain, pt, rank_tol).G;
}

UnifiedPoint project_onto_chain(const LagrangianSystem& sys, const ConstraintChain& chain,
                                const UnifiedPoint& pt, double tol, int max_iter) {
  (void)sys;
  const int n = pt.n();
  std::vector<bool> mask(static_cast<std::size_t>(3 * n + 1), false);
  for (int i = 0; i < 2 * n; ++i) mask[static_cast<std::size_t>(1 + n + i)] = true;  // v and p
  return project_onto_constraints(chain.all(), pt, mask, tol, max_iter);
}

Trajectory integrate(const LagrangianSystem& sys, const ConstraintChain& chain,
                     const UnifiedPoint& pt0, const IntegratorOptions& opts) {
  if (opts.step <= 0.0) throw EngineError("integrate: step must be positive");
  if (chain.termination == ChainTermination::GaugeFreedom &&
      opts.lambda_rule == LambdaRule::None)
    throw VectorFieldUndetermined(
        "integrate: the chain leaves free directions and no rule was supplied");

  UnifiedPoint pt = pt0;
  try {
    pt = project_onto_chain(sys, chain, pt, opts.projection.tol, opts.projection.max_iter);
  } catch (const NoConvergence& e) {
    throw ProjectionFailed(std::string("initial point: ") + e.what());
  }

  const double span = opts.t_end - pt.t;
  if (span <= 0.0) throw EngineError("integrate: t_end must exceed the initial time");
  const long long steps = std::max(1LL, static_cast<long long>(std::llround(span / opts.step)));
  const double h = span / static_cast<double>(steps);

  Trajectory traj;
  traj.step = h;
  traj.points.reserve(static_cast<std::size_t>(steps) + 1);
  traj.diagnostics.reserve(static_cast<std::size_t>(steps) + 1);

  auto record = [&](const UnifiedPoint& y) {
    PointDiagnostics d;
    d.constraint_residual = chain.residual(y);
    const Eigen::VectorXd a = resolve_acceleration(sys, chain, y, opts.rank_tol);
    d.el_residual = euler_lagrange_residual(sys, y.t, y.q, y.v, a).norm();
    d.energy = y.p.dot(y.v) - sys.L.value(pack_tqv(y.t, y.q, y.v));
    traj.points.push_back(y);
    traj.diagnostics.push_back(d);
  };

  record(pt);
  Eigen::VectorXd x = pack_tqvp(pt);
  for (long long k = 0; k < steps; ++k) {
    if (opts.scheme == Scheme::Euler) {
      x += h * rhs(sys, chain, x, opts.rank_tol);
    } else {
      const Eigen::VectorXd k1 = rhs(sys, chain, x, opts.rank_tol);
      const Eigen::VectorXd k2 = rhs(sys, chain, x + 0.5 * h * k1, opts.rank_tol);
      const Eigen::VectorXd k3 = rhs(sys, chain, x + 0.5 * h * k2, opts.rank_tol);
      const Eigen::VectorXd k4 = rhs(sys, chain, x + h * k3, opts.rank_tol);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    UnifiedPoint y = unpack_tqvp(sys.n, x);
    if (opts.projection.enabled) {
      try {
        y = project_onto_chain(sys, chain, y, opts.projection.tol, opts.projection.max_iter);
      } catch (const NoConvergence& e) {
        throw ProjectionFailed(std::string("step ") + std::to_string(k + 1) + ": " + e.what());
      }
      x = pack_tqvp(y);
    }
    record(y);
  }
  return traj;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  if (traj.points.empty()) return;
  const int n = traj.points[0].n();
  os << "t";
  for (int i = 0; i < n; ++i) os << ",q" << i;
  for (int i = 0; i < n; ++i) os << ",v" << i;
  for (int i = 0; i < n; ++i) os << ",p" << i;
  os << ",constraint_residual,el_residual,energy\n";

  char buf[40];
  auto put = [&](double x, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf << sep;
  };
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const auto& pt = traj.points[k];
    const auto& d = traj.diagnostics[k];
    put(pt.t, ',');
    for (int i = 0; i < n; ++i) put(pt.q[i], ',');
    for (int i = 0; i < n; ++i) put(pt.v[i], ',');
    for (int i = 0; i < n; ++i) put(pt.p[i], ',');
    put(d.constraint_residual, ',');
    put(d.el_residual, ',');
    put(d.energy, '\n');
  }
}

}  // namespace srusk
