#ifndef SRUSK_UNIFIED_HPP
#define SRUSK_UNIFIED_HPP

#include <Eigen/Dense>
#include <vector>

#include "srusk/lagrangian.hpp"

// Dynamics on the unified velocity-momentum space.  Working coordinates are
// (t, q, v, p); the energy coordinate is eliminated and reconstructed by
// `embed`, which produces points of the extended space (t, q, v, p_energy, p).

namespace srusk {

struct UnifiedPoint {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  Eigen::VectorXd p;

  int n() const { return static_cast<int>(q.size()); }
};

struct ExtendedPoint {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  double p_energy = 0.0;
  Eigen::VectorXd p;
};

// Coordinate vector (t, q, v, p) of length 3n+1.
Eigen::VectorXd pack_tqvp(const UnifiedPoint& pt);
UnifiedPoint unpack_tqvp(int n, const Eigen::VectorXd& x);

// Points violating the membership constraints beyond this are rejected.
inline constexpr double kOnManifoldTol = 1e-8;

// Inclusion into the extended space: p_energy = L - p.v, exact by construction.
ExtendedPoint embed(const LagrangianSystem& sys, const UnifiedPoint& pt);

// Coupling function: p_energy + p_i v^i.
double coupling(const ExtendedPoint& pt);

// Membership residual of the level set where coupling equals the Lagrangian.
double w0_residual(const LagrangianSystem& sys, const ExtendedPoint& pt);

struct Theta0 {
  double dt_coefficient = 0.0;        // L - p.v
  Eigen::VectorXd dq_coefficients;    // p
};

Theta0 theta0(const LagrangianSystem& sys, const UnifiedPoint& pt);

// Matrix of the presymplectic two-form in coordinates (t, q, v, p):
// dE ^ dt - dp_i ^ dq^i with E = p.v - L.  Antisymmetric exactly.
Eigen::MatrixXd omega0_matrix(const LagrangianSystem& sys, const UnifiedPoint& pt);

// phi_i = p_i - dL/dv^i; all zero exactly on the graph of the Legendre map.
Eigen::VectorXd primary_constraints(const LagrangianSystem& sys, const UnifiedPoint& pt);

// The pointwise tangency system for the dv/dt components:
// W G = b with W the velocity Hessian and
// b_j = dL/dq^j - d2L/dt dv^j - (d2L/dq^i dv^j) v^i.
struct VelocityTangency {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  Eigen::VectorXd H;   // dL/dq, the dp/dt components
};

VelocityTangency velocity_tangency(const LagrangianSystem& sys, double t,
                                   const Eigen::VectorXd& q, const Eigen::VectorXd& v);

// Components of a vector field X0 = d/dt + F d/dq + G d/dv + H d/dp at a
// point.  The dt component is identically 1 and F equals v exactly.  The
// full solution set is G_particular + span(G_kernel).
struct VectorFieldSolution {
  Eigen::VectorXd F;
  Eigen::VectorXd G_particular;
  std::vector<Eigen::VectorXd> G_kernel;   // orthonormal free directions
  Eigen::VectorXd H;
  double consistency_defect = 0.0;         // |W G_particular - b|
};

// Solves the tangency system at a point of the primary constraint set.
// G_particular is the minimum-norm least-squares solution; free directions
// are reported, never chosen silently.
VectorFieldSolution solve_vector_field(const LagrangianSystem& sys, const UnifiedPoint& pt,
                                       double rank_tol = kDefaultRankTol);

}  // namespace srusk

#endif
