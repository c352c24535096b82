#ifndef SRUSK_INTEGRATOR_HPP
#define SRUSK_INTEGRATOR_HPP

#include <iosfwd>
#include <vector>

#include "srusk/constraints.hpp"

// Fixed-step explicit integration of the dynamical vector field on the
// final constraint set, with per-stage resolution of the free coefficients
// and optional post-step Newton projection.

namespace srusk {

enum class Scheme { RK4, Euler };

// How free kernel coefficients are fixed during integration.  None refuses
// to integrate gauge systems; Zero picks the canonical minimum-norm field.
enum class LambdaRule { None, Zero };

struct ProjectionOptions {
  bool enabled = false;
  double tol = 1e-10;
  int max_iter = 25;
};

struct IntegratorOptions {
  double step = 1e-3;          // nominal; adjusted so the grid lands on t_end
  Scheme scheme = Scheme::RK4;
  ProjectionOptions projection;
  double t_end = 1.0;
  LambdaRule lambda_rule = LambdaRule::None;
  double rank_tol = kDefaultRankTol;
};

struct PointDiagnostics {
  double constraint_residual = 0.0;  // max over the chain
  double el_residual = 0.0;          // |Euler-Lagrange residual| with a = G
  double energy = 0.0;               // p.v - L
};

struct Trajectory {
  std::vector<UnifiedPoint> points;       // uniform time grid
  std::vector<PointDiagnostics> diagnostics;
  double step = 0.0;                      // effective step used
};

// dv/dt components with the free coefficients resolved against the chain:
// minimum-norm solution of the stacked tangency conditions.
Eigen::VectorXd resolve_acceleration(const LagrangianSystem& sys, const ConstraintChain& chain,
                                     const UnifiedPoint& pt, double rank_tol = kDefaultRankTol);

// Least-norm Newton correction in (v, p) only; t and q are never moved.
UnifiedPoint project_onto_chain(const LagrangianSystem& sys, const ConstraintChain& chain,
                                const UnifiedPoint& pt, double tol, int max_iter);

// Integrate from pt0 (projected onto the chain first) to opts.t_end.
Trajectory integrate(const LagrangianSystem& sys, const ConstraintChain& chain,
                     const UnifiedPoint& pt0, const IntegratorOptions& opts);

// CSV schema: t,q0..,v0..,p0..,constraint_residual,el_residual,energy with
// 17 significant digits per number.
void write_csv(const Trajectory& traj, std::ostream& os);

}  // namespace srusk

#endif
