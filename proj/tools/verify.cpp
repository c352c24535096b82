#include "verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "srusk/errors.hpp"
#include "srusk/integrator.hpp"
#include "srusk/report.hpp"

namespace srusk {

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::VectorXd fd_gradient_of(const ScalarField& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f.value(xp) - f.value(xm)) / (2.0 * h);
  }
  return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::vector<CheckResult> run_verification(const RunConfig& rc) {
  std::vector<CheckResult> out;
  auto pass = [&](const std::string& name) { out.push_back({name, CheckResult::Status::Pass, ""}); };
  auto fail = [&](const std::string& name, const std::string& detail) {
    out.push_back({name, CheckResult::Status::Fail, detail});
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    out.push_back({name, CheckResult::Status::Skip, why});
  };

  const LagrangianSystem sys = build_model(rc.model);
  const int n = sys.n;
  std::vector<UnifiedPoint> pts = draw_samples(rc.analysis, n, rc.seed);
  if (pts.size() > 10) pts.resize(10);
  std::mt19937_64 rng(rc.seed ^ 0x5eedULL);

  // 1. first and second derivatives of L against central differences
  {
    double worst = 0.0;
    for (const auto& pt : pts) {
      const Eigen::VectorXd x = pack_tqv(pt.t, pt.q, pt.v);
      const Jet2 j = sys.L.jet2(x);
      const Eigen::VectorXd gfd = fd_gradient_of(sys.L, x, 1e-5);
      for (int i = 0; i < x.size(); ++i) worst = std::max(worst, rel(j.gradient[i], gfd[i]));
      // Hessian rows of L against differences of the exact gradient field
      for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += 1e-5;
        xm[i] -= 1e-5;
        const Eigen::VectorXd row =
            (sys.L.jet1(xp).gradient - sys.L.jet1(xm).gradient) / 2e-5;
        for (int k = 0; k < x.size(); ++k)
          worst = std::max(worst, rel(j.hessian(i, k), row[k]));
      }
    }
    if (worst < 1e-6)
      pass("ad-derivatives-vs-finite-differences");
    else
      fail("ad-derivatives-vs-finite-differences", "worst relative error " + std::to_string(worst));
  }

  // 2. bitwise Hessian symmetry
  {
    bool ok = true;
    for (const auto& pt : pts) {
      const Jet2 j = sys.L.jet2(pack_tqv(pt.t, pt.q, pt.v));
      for (int i = 0; i < j.hessian.rows() && ok; ++i)
        for (int k = 0; k < i; ++k)
          if (j.hessian(i, k) != j.hessian(k, i)) {
            ok = false;
            break;
          }
    }
    ok ? pass("ad-hessian-symmetry") : fail("ad-hessian-symmetry", "asymmetric entry found");
  }

  // 3. directional derivative against the gradient route
  {
    double worst = 0.0;
    for (const auto& pt : pts) {
      const Eigen::VectorXd x = pack_tqv(pt.t, pt.q, pt.v);
      Eigen::VectorXd d(x.size());
      for (int i = 0; i < d.size(); ++i) d[i] = 2.0 * unit_draw(rng) - 1.0;
      worst = std::max(worst,
                       std::abs(sys.L.directional(x, d) - sys.L.jet1(x).gradient.dot(d)));
    }
    if (worst < 1e-12)
      pass("ad-directional-vs-gradient");
    else
      fail("ad-directional-vs-gradient", "worst deviation " + std::to_string(worst));
  }

  // 4. kernel dimension must not depend on a sane rank tolerance
  {
    bool ok = true;
    std::ostringstream why;
    for (const auto& pt : pts) {
      const auto rep_cfg = regularity(sys, pt.t, pt.q, pt.v, rc.analysis.rank_tol);
      const auto rep_ref = regularity(sys, pt.t, pt.q, pt.v, kDefaultRankTol);
      if (rep_cfg.kernel_basis.size() != rep_ref.kernel_basis.size()) {
        ok = false;
        why << "kernel dimension " << rep_cfg.kernel_basis.size() << " at rank_tol "
            << rc.analysis.rank_tol << " vs " << rep_ref.kernel_basis.size() << " at "
            << kDefaultRankTol;
        break;
      }
    }
    ok ? pass("hessian-kernel-stability") : fail("hessian-kernel-stability", why.str());
  }

  // 5. exact antisymmetry of the presymplectic matrix
  {
    double worst = 0.0;
    for (const auto& pt : pts)
      worst = std::max(worst,
                       (omega0_matrix(sys, pt) + omega0_matrix(sys, pt).transpose())
                           .lpNorm<Eigen::Infinity>());
    worst == 0.0 ? pass("omega0-antisymmetry")
                 : fail("omega0-antisymmetry", "deviation " + std::to_string(worst));
  }

  // 6. omega0 equals minus the finite-difference exterior derivative of theta0
  {
    double worst = 0.0;
    const int dim = 3 * n + 1;
    int used = 0;
    for (const auto& pt : pts) {
      if (++used > 5) break;
      const Eigen::MatrixXd M = omega0_matrix(sys, pt);
      auto theta_at = [&](const Eigen::VectorXd& x) {
        const Theta0 th = theta0(sys, unpack_tqvp(n, x));
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
        c[0] = th.dt_coefficient;
        c.segment(1, n) = th.dq_coefficients;
        return c;
      };
      const Eigen::VectorXd x0 = pack_tqvp(pt);
      Eigen::MatrixXd jac(dim, dim);
      for (int a = 0; a < dim; ++a) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp[a] += 1e-5;
        xm[a] -= 1e-5;
        jac.row(a) = ((theta_at(xp) - theta_at(xm)) / 2e-5).transpose();
      }
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          worst = std::max(worst, std::abs(M(a, b) + (jac(a, b) - jac(b, a))));
    }
    if (worst < 1e-6)
      pass("theta0-omega0-consistency");
    else
      fail("theta0-omega0-consistency", "worst deviation " + std::to_string(worst));
  }

  // 7. vertical contractions of omega0 produce the primary constraints
  {
    double worst = 0.0;
    for (const auto& pt : pts) {
      const Eigen::MatrixXd M = omega0_matrix(sys, pt);
      const Eigen::VectorXd phi = primary_constraints(sys, pt);
      for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd row = M.row(1 + n + i);
        worst = std::max(worst, std::abs(row[0] - phi[i]));
        worst = std::max(worst, row.tail(3 * n).lpNorm<Eigen::Infinity>());
      }
    }
    if (worst < 1e-12)
      pass("vertical-contraction-lemma");
    else
      fail("vertical-contraction-lemma", "worst deviation " + std::to_string(worst));
  }

  // 8. holonomy components and the dt balance of the solved field
  {
    bool bitwise = true;
    double worst = 0.0;
    for (auto pt : pts) {
      pt.p = legendre_restricted(sys, pt.t, pt.q, pt.v);
      const VectorFieldSolution sol = solve_vector_field(sys, pt, rc.analysis.rank_tol);
      for (int i = 0; i < n; ++i)
        if (sol.F[i] != pt.v[i]) bitwise = false;
      const Jet1 j = sys.L.jet1(pack_tqv(pt.t, pt.q, pt.v));
      Eigen::VectorXd G = sol.G_particular;
      for (const auto& k : sol.G_kernel) G += (2.0 * unit_draw(rng) - 1.0) * k;
      const double res = -sol.F.dot(j.gradient.segment(1, n)) +
                         G.dot(pt.p - j.gradient.segment(1 + n, n)) + sol.H.dot(pt.v);
      worst = std::max(worst, std::abs(res));
    }
    if (bitwise && worst < 1e-10)
      pass("holonomy-and-dt-balance");
    else
      fail("holonomy-and-dt-balance",
           bitwise ? "dt balance " + std::to_string(worst) : "holonomy not bitwise");
  }

  // 9. primary constraints vanish on the graph of the Legendre map
  {
    double worst = 0.0;
    for (auto pt : pts) {
      pt.p = legendre_restricted(sys, pt.t, pt.q, pt.v);
      worst = std::max(worst, primary_constraints(sys, pt).lpNorm<Eigen::Infinity>());
    }
    if (worst < 1e-12)
      pass("primary-constraints-on-graph");
    else
      fail("primary-constraints-on-graph", "worst residual " + std::to_string(worst));
  }

  // Regular-case checks need an invertible Legendre map.
  const bool regular_everywhere = [&] {
    for (const auto& pt : pts)
      if (regularity(sys, pt.t, pt.q, pt.v).classification == Regularity::Singular) return false;
    return true;
  }();

  // 10. Legendre round trip
  if (!regular_everywhere) {
    skip("legendre-roundtrip", "singular model");
  } else {
    double worst = 0.0;
    try {
      for (const auto& pt : pts) {
        const Eigen::VectorXd p = legendre_restricted(sys, pt.t, pt.q, pt.v);
        const Eigen::VectorXd v2 =
            legendre_invert(sys, pt.t, pt.q, p, Eigen::VectorXd::Zero(n));
        worst = std::max(worst, (v2 - pt.v).lpNorm<Eigen::Infinity>());
      }
      if (worst < 1e-9)
        pass("legendre-roundtrip");
      else
        fail("legendre-roundtrip", "worst deviation " + std::to_string(worst));
    } catch (const EngineError& e) {
      fail("legendre-roundtrip", e.what());
    }
  }

  // 11. the unified pipeline against the direct Euler-Lagrange oracle
  if (!regular_everywhere) {
    skip("unified-vs-direct-oracle", "singular model");
  } else {
    try {
      auto chain =
          run_constraint_algorithm(sys, draw_samples(rc.analysis, n, rc.seed),
                                   build_analysis_options(rc.analysis));
      UnifiedPoint pt0 = pts[0];
      pt0.p = legendre_restricted(sys, pt0.t, pt0.q, pt0.v);
      IntegratorOptions opts;
      opts.step = 1e-3;
      opts.t_end = pt0.t + 1.0;
      opts.projection.enabled = true;
      const Trajectory traj = integrate(sys, chain, pt0, opts);
      const auto oracle = direct_el_oracle(sys, pt0.t, pt0.q, pt0.v, 1e-3, pt0.t + 1.0);
      double worst = 0.0;
      for (std::size_t k = 0; k < traj.points.size(); k += 50)
        worst = std::max(worst, (traj.points[k].q - oracle.q[k]).lpNorm<Eigen::Infinity>());
      if (worst < 1e-8)
        pass("unified-vs-direct-oracle");
      else
        fail("unified-vs-direct-oracle", "worst deviation " + std::to_string(worst));
    } catch (const EngineError& e) {
      fail("unified-vs-direct-oracle", e.what());
    }
  }

  return out;
}

}  // namespace srusk
