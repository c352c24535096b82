#include "srusk/constraints.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "srusk/errors.hpp"

namespace srusk {

std::string to_string(ChainTermination t) {
  switch (t) {
    case ChainTermination::AllDetermined:
      return "AllDetermined";
    case ChainTermination::GaugeFreedom:
      return "GaugeFreedom";
    case ChainTermination::Inconsistent:
      return "Inconsistent";
    case ChainTermination::MaxLevelsReached:
      return "MaxLevelsReached";
  }
  return "?";
}

std::vector<const ConstraintFunction*> ConstraintChain::all() const {
  std::vector<const ConstraintFunction*> out;
  for (const auto& lvl : levels)
    for (const auto& c : lvl) out.push_back(&c);
  return out;
}

std::vector<int> ConstraintChain::level_sizes() const {
  std::vector<int> out;
  for (const auto& lvl : levels) out.push_back(static_cast<int>(lvl.size()));
  return out;
}

int ConstraintChain::total() const {
  int t = 0;
  for (const auto& lvl : levels) t += static_cast<int>(lvl.size());
  return t;
}

double ConstraintChain::residual(const UnifiedPoint& pt) const {
  const Eigen::VectorXd x = pack_tqvp(pt);
  double r = 0.0;
  for (const auto& lvl : levels)
    for (const auto& c : lvl) r = std::max(r, std::abs(c.f.value(x)));
  return r;
}

std::vector<ConstraintFunction> primary_level(const LagrangianSystem& sys) {
  const int n = sys.n;
  std::vector<ConstraintFunction> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    ConstraintFunction c;
    c.id = i;
    c.level = 1;
    c.provenance.kind = ConstraintProvenance::Kind::Primary;
    c.provenance.primary_index = i;
    const Expr body = Expr::variable(1 + 2 * n + i) - derivative(sys.L.body(), 1 + n + i);
    c.f = ScalarField(3 * n + 1, body);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// d(phi) along X0 with the dv/dt part removed:
// D = dphi/dt + v.dphi/dq + H.dphi/dp, with H_i = dL/dq^i.
// For a direction u with u . dphi/dv = 0 this is the tangency value of
// u . phi, and it stays an expression (differentiable for later levels).
Expr drift_expr(const LagrangianSystem& sys, const ConstraintFunction& c) {
  const int n = sys.n;
  const Expr& body = c.f.body();
  Expr d = derivative(body, 0);
  for (int i = 0; i < n; ++i)
    d = d + Expr::variable(1 + n + i) * derivative(body, 1 + i);
  for (int i = 0; i < n; ++i) {
    const Expr dp = derivative(body, 1 + 2 * n + i);
    if (!dp.is_const(0.0)) d = d + derivative(sys.L.body(), 1 + i) * dp;
  }
  return d;
}

struct SampleRows {
  VectorFieldSolution vfs;
  Eigen::MatrixXd C;   // m x n, rows dphi/dv
  Eigen::VectorXd D;   // m, drift values
  Eigen::VectorXd grad_inf;   // m, sup norm of full gradients (row scales)
};

SampleRows sample_rows(const LagrangianSystem& sys,
                       const std::vector<const ConstraintFunction*>& actives,
                       const UnifiedPoint& pt, double rank_tol) {
  const int n = sys.n;
  const int m = static_cast<int>(actives.size());
  SampleRows sr;
  sr.vfs = solve_vector_field(sys, pt, rank_tol);
  sr.C.resize(m, n);
  sr.D.resize(m);
  sr.grad_inf.resize(m);
  const Eigen::VectorXd x = pack_tqvp(pt);
  for (int r = 0; r < m; ++r) {
    const Jet1 j = actives[r]->f.jet1(x);
    sr.C.row(r) = j.gradient.segment(1 + n, n);
    sr.D[r] = j.gradient[0] + j.gradient.segment(1, n).dot(pt.v) +
              j.gradient.segment(1 + 2 * n, n).dot(sr.vfs.H);
    sr.grad_inf[r] = j.gradient.lpNorm<Eigen::Infinity>();
  }
  return sr;
}

Eigen::MatrixXd kernel_matrix(const VectorFieldSolution& vfs, int n) {
  Eigen::MatrixXd K(n, static_cast<int>(vfs.G_kernel.size()));
  for (int j = 0; j < K.cols(); ++j) K.col(j) = vfs.G_kernel[static_cast<std::size_t>(j)];
  return K;
}

// sin of the largest principal angle between equal-dimension subspaces.
double subspace_sine(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose() * B);
  const double c = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, c) * std::min(1.0, c)));
}

int svd_rank(const Eigen::MatrixXd& M, double rank_tol) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  if (smax == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] >= rank_tol * smax) ++r;
  return r;
}

void sign_normalize(Eigen::VectorXd& u) {
  for (int i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-12) {
      if (u[i] < 0.0) u = -u;
      return;
    }
  }
}

}  // namespace

UnifiedPoint project_onto_constraints(const std::vector<const ConstraintFunction*>& constraints,
                                      const UnifiedPoint& pt, const std::vector<bool>& mask,
                                      double tol, int max_iter) {
  const int n = pt.n();
  const int dim = 3 * n + 1;
  if (static_cast<int>(mask.size()) != dim) throw EngineError("projection mask has wrong length");
  const int m = static_cast<int>(constraints.size());

  std::vector<int> free_idx;
  for (int i = 0; i < dim; ++i)
    if (mask[i]) free_idx.push_back(i);

  Eigen::VectorXd x = pack_tqvp(pt);
  auto residual = [&](const Eigen::VectorXd& xx) {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r[i] = constraints[static_cast<std::size_t>(i)]->f.value(xx);
    return r;
  };

  Eigen::VectorXd r = residual(x);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (r.lpNorm<Eigen::Infinity>() <= tol) return unpack_tqvp(n, x);

    Eigen::MatrixXd J(m, static_cast<int>(free_idx.size()));
    for (int i = 0; i < m; ++i) {
      const Jet1 jt = constraints[static_cast<std::size_t>(i)]->f.jet1(x);
      for (std::size_t c = 0; c < free_idx.size(); ++c)
        J(i, static_cast<int>(c)) = jt.gradient[free_idx[c]];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd step = svd.solve(-r);
    if (!step.allFinite()) throw NoConvergence("projection: singular step");

    double alpha = 1.0;
    Eigen::VectorXd x_next, r_next;
    for (int halving = 0; halving < 30; ++halving) {
      x_next = x;
      for (std::size_t c = 0; c < free_idx.size(); ++c) x_next[free_idx[c]] += alpha * step[static_cast<int>(c)];
      r_next = residual(x_next);
      if (r_next.lpNorm<Eigen::Infinity>() <= r.lpNorm<Eigen::Infinity>() || alpha < 1e-10) break;
      alpha *= 0.5;
    }
    x = x_next;
    r = r_next;
  }
  if (r.lpNorm<Eigen::Infinity>() <= tol) return unpack_tqvp(n, x);
  throw NoConvergence("projection onto the constraint set did not converge");
}

TangencySystem tangency_system(const LagrangianSystem& sys, const ConstraintChain& chain,
                               const UnifiedPoint& pt, double rank_tol) {
  if (chain.residual(pt) > kOnManifoldTol)
    throw NotOnConstraintSet("tangency_system: point violates the current constraint set");
  const auto actives = chain.all();
  const SampleRows sr = sample_rows(sys, actives, pt, rank_tol);
  TangencySystem ts;
  ts.A = sr.C * sr.vfs.G_particular + sr.D;
  ts.B = sr.C * kernel_matrix(sr.vfs, sys.n);
  return ts;
}

ExtendOutcome extend_chain(const LagrangianSystem& sys, ConstraintChain& chain,
                           const AnalysisOptions& opts) {
  const int n = sys.n;
  const auto actives = chain.all();
  const int m = static_cast<int>(actives.size());
  const int P = static_cast<int>(chain.sample_points.size());
  if (P == 0) throw EngineError("extend_chain: no sample points");

  // Rows and vector-field solutions at every sample point; sample 0 is the base.
  std::vector<SampleRows> rows;
  rows.reserve(static_cast<std::size_t>(P));
  for (const auto& pt : chain.sample_points)
    rows.push_back(sample_rows(sys, actives, pt, opts.rank_tol));

  const int kappa = static_cast<int>(rows[0].vfs.G_kernel.size());
  const Eigen::MatrixXd K_base = kernel_matrix(rows[0].vfs, n);
  chain.kernel_dim = kappa;
  for (int j = 1; j < P; ++j) {
    if (static_cast<int>(rows[static_cast<std::size_t>(j)].vfs.G_kernel.size()) != kappa)
      throw RankDrift("velocity Hessian kernel changes dimension across sample points");
    const double s =
        subspace_sine(K_base, kernel_matrix(rows[static_cast<std::size_t>(j)].vfs, n));
    chain.kernel_drift = std::max(chain.kernel_drift, s);
  }

  // Row scales from the base gradients make the rank decisions dimensionless.
  Eigen::VectorXd scale(m);
  for (int r = 0; r < m; ++r) scale[r] = std::max(rows[0].grad_inf[r], 1e-30);

  Eigen::MatrixXd C_base_n = rows[0].C;
  for (int r = 0; r < m; ++r) C_base_n.row(r) /= scale[r];

  // Left-null basis of the stacked dv rows at the base point.
  Eigen::JacobiSVD<Eigen::MatrixXd> csvd(C_base_n, Eigen::ComputeFullU);
  int rankC = 0;
  {
    const auto& sv = csvd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    for (int i = 0; i < sv.size(); ++i)
      if (smax > 0.0 && sv[i] >= opts.rank_tol * smax) ++rankC;
  }
  const int s = m - rankC;
  const Eigen::MatrixXd U_ln = csvd.matrixU().rightCols(s);

  // Violation values of the left-null directions at every sample point.
  Eigen::MatrixXd R(s, P);
  double dmax = 0.0;
  for (int j = 0; j < P; ++j) {
    Eigen::VectorXd Dn = rows[static_cast<std::size_t>(j)].D.cwiseQuotient(scale);
    dmax = std::max(dmax, Dn.lpNorm<Eigen::Infinity>());
    if (s > 0) R.col(j) = U_ln.transpose() * Dn;
  }
  const double tau = opts.detect_tol * std::max(1.0, dmax);

  // Principal violation directions, frozen from the base-point null basis.
  std::vector<Eigen::VectorXd> directions;
  if (s > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(R, Eigen::ComputeFullU);
    const auto& sv = rsvd.singularValues();
    for (int k = 0; k < sv.size(); ++k)
      if (sv[k] > tau * std::sqrt(static_cast<double>(P)))
        directions.push_back(U_ln * rsvd.matrixU().col(k));
  }

  // Build candidate constraint functions u . D and filter them.
  std::vector<ConstraintFunction> fresh;
  const Eigen::VectorXd x_base = pack_tqvp(chain.sample_points[0]);

  Eigen::MatrixXd grads(3 * n + 1, m);
  for (int r = 0; r < m; ++r) grads.col(r) = actives[static_cast<std::size_t>(r)]->f.jet1(x_base).gradient;

  std::unordered_map<int, Expr> drift_memo;
  auto drift_of = [&](int row) -> const Expr& {
    auto it = drift_memo.find(row);
    if (it == drift_memo.end())
      it = drift_memo.emplace(row, drift_expr(sys, *actives[static_cast<std::size_t>(row)])).first;
    return it->second;
  };

  for (const auto& un : directions) {
    // Back to unnormalized rows; tiny components are SVD noise, not structure.
    Eigen::VectorXd u = un.cwiseQuotient(scale);
    const double umax = u.lpNorm<Eigen::Infinity>();
    for (int r = 0; r < m; ++r)
      if (std::abs(u[r]) < opts.direction_cleanup * umax) u[r] = 0.0;
    u.normalize();
    sign_normalize(u);

    Expr body(0.0);
    for (int r = 0; r < m; ++r)
      if (u[r] != 0.0) body = body + u[r] * drift_of(r);
    ConstraintFunction cand;
    cand.level = static_cast<int>(chain.levels.size()) + 1;
    cand.f = ScalarField(3 * n + 1, body);
    cand.provenance.kind = ConstraintProvenance::Kind::Tangency;
    cand.provenance.direction = u;
    for (const auto* a : actives) cand.provenance.parent_ids.push_back(a->id);

    const Jet1 jb = cand.f.jet1(x_base);

    // A condition that is numerically constant and nonzero has no zero set.
    if (std::abs(jb.value) > tau &&
        jb.gradient.lpNorm<Eigen::Infinity>() < 1e-9 * std::abs(jb.value)) {
      chain.termination = ChainTermination::Inconsistent;
      return ExtendOutcome::Terminated;
    }

    // Keep only gradients outside the span of what we already have.
    const auto cod = grads.completeOrthogonalDecomposition();
    const Eigen::VectorXd coef = cod.solve(jb.gradient);
    const double rel = (grads * coef - jb.gradient).norm() / std::max(jb.gradient.norm(), 1e-300);
    if (rel <= opts.indep_tol) continue;

    grads.conservativeResize(Eigen::NoChange, grads.cols() + 1);
    grads.col(grads.cols() - 1) = jb.gradient;
    fresh.push_back(std::move(cand));
  }

  if (!fresh.empty()) {
    if (static_cast<int>(chain.levels.size()) >= opts.max_levels) {
      chain.termination = ChainTermination::MaxLevelsReached;
      return ExtendOutcome::Terminated;
    }
    int next_id = chain.total();
    for (auto& c : fresh) c.id = next_id++;
    chain.levels.push_back(std::move(fresh));

    // Re-project the samples onto the extended zero set.
    const auto now_active = chain.all();
    std::vector<bool> mask(static_cast<std::size_t>(3 * n + 1), true);
    mask[0] = false;  // t is never moved
    std::vector<UnifiedPoint> kept;
    for (const auto& pt : chain.sample_points) {
      try {
        kept.push_back(
            project_onto_constraints(now_active, pt, mask, opts.proj_tol, opts.proj_max_iter));
      } catch (const NoConvergence&) {
      }
    }
    if (kept.empty()) {
      chain.termination = ChainTermination::Inconsistent;
      return ExtendOutcome::Terminated;
    }
    chain.sample_points = std::move(kept);
    chain.base_point = chain.sample_points[0];
    return ExtendOutcome::Extended;
  }

  // Nothing new anywhere: decide how the algorithm ends from the rank of B.
  int free_base = -1;
  bool varies = false;
  for (int j = 0; j < P; ++j) {
    Eigen::MatrixXd Cn = rows[static_cast<std::size_t>(j)].C;
    for (int r = 0; r < m; ++r) Cn.row(r) /= scale[r];
    const Eigen::MatrixXd B = Cn * kernel_matrix(rows[static_cast<std::size_t>(j)].vfs, n);
    const int free_here = kappa - svd_rank(B, opts.rank_tol);
    if (j == 0)
      free_base = free_here;
    else if (free_here != free_base)
      varies = true;
  }
  chain.free_dim_varies = varies;
  if (free_base == 0) {
    chain.termination = ChainTermination::AllDetermined;
  } else {
    chain.termination = ChainTermination::GaugeFreedom;
    chain.gauge_dim = free_base;
  }
  return ExtendOutcome::Terminated;
}

ConstraintChain run_constraint_algorithm(const LagrangianSystem& sys,
                                         const std::vector<UnifiedPoint>& sample_points,
                                         const AnalysisOptions& opts) {
  if (sample_points.empty()) throw EngineError("run_constraint_algorithm: no sample points");
  const int n = sys.n;

  ConstraintChain chain;
  chain.n = n;
  chain.levels.push_back(primary_level(sys));

  std::vector<bool> mask(static_cast<std::size_t>(3 * n + 1), true);
  mask[0] = false;
  const auto primaries = chain.all();
  for (const auto& pt : sample_points) {
    try {
      chain.sample_points.push_back(
          project_onto_constraints(primaries, pt, mask, opts.proj_tol, opts.proj_max_iter));
    } catch (const NoConvergence&) {
    }
  }
  if (chain.sample_points.empty())
    throw EngineError("run_constraint_algorithm: no sample point could be projected");
  chain.base_point = chain.sample_points[0];

  while (true) {
    if (extend_chain(sys, chain, opts) == ExtendOutcome::Terminated) break;
  }

  // Final residual statistics per level over the surviving samples.
  chain.level_reports.clear();
  for (std::size_t l = 0; l < chain.levels.size(); ++l) {
    LevelReport rep;
    rep.level = static_cast<int>(l) + 1;
    rep.size = static_cast<int>(chain.levels[l].size());
    double sum = 0.0;
    int count = 0;
    for (const auto& pt : chain.sample_points) {
      const Eigen::VectorXd x = pack_tqvp(pt);
      for (const auto& c : chain.levels[l]) {
        const double r = std::abs(c.f.value(x));
        rep.max_residual = std::max(rep.max_residual, r);
        sum += r;
        ++count;
      }
    }
    rep.mean_residual = count ? sum / count : 0.0;
    chain.level_reports.push_back(rep);
  }
  return chain;
}

ConstraintChain run_constraint_algorithm(const LagrangianSystem& sys,
                                         const std::vector<UnifiedPoint>& sample_points,
                                         int max_levels, double rank_tol) {
  AnalysisOptions opts;
  opts.max_levels = max_levels;
  opts.rank_tol = rank_tol;
  return run_constraint_algorithm(sys, sample_points, opts);
}

}  // namespace srusk
