#ifndef SRUSK_LAGRANGIAN_HPP
#define SRUSK_LAGRANGIAN_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "srusk/field.hpp"

// A time-dependent Lagrangian system on velocity phase space, with the
// classical point operations: Legendre maps, velocity Hessian and its rank,
// Euler-Lagrange residual, and the Hamiltonian of the regular case.
//
// Argument order is fixed globally as (t, q^1..q^n, v^1..v^n); the field L
// therefore has arity 2n+1.  LagrangianSystem is immutable after
// construction and all operations here are pure.

namespace srusk {

struct LagrangianSystem {
  int n = 0;            // degrees of freedom
  ScalarField L;        // arity 2n+1, argument order (t, q, v)
  std::string name;

  LagrangianSystem() = default;
  LagrangianSystem(int n_, ScalarField L_, std::string name_ = "");

  // Variable indices of L's argument vector.
  int it() const { return 0; }
  int iq(int i) const { return 1 + i; }
  int iv(int i) const { return 1 + n + i; }

  // dL/dv^i as a field; cached so Hessian rows come from first-order jets.
  const ScalarField& dLdv(int i) const { return dLdv_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<ScalarField> dLdv_;
};

enum class Regularity { Regular, Singular };

struct RegularityReport {
  Regularity classification = Regularity::Regular;
  Eigen::VectorXd singular_values;            // descending
  std::vector<Eigen::VectorXd> kernel_basis;  // orthonormal, empty when Regular
  double tolerance_used = 0.0;
};

struct ExtendedMomenta {
  double p_energy = 0.0;   // L - v.p
  Eigen::VectorXd p;
};

// Default tolerances.
inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kDefaultNewtonTol = 1e-12;
inline constexpr int kDefaultNewtonMaxIter = 50;

Eigen::VectorXd pack_tqv(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& v);

// p_i = dL/dv^i
Eigen::VectorXd legendre_restricted(const LagrangianSystem& sys, double t,
                                    const Eigen::VectorXd& q, const Eigen::VectorXd& v);

// (p, p_energy) with p_energy = L - v^i p_i
ExtendedMomenta legendre_extended(const LagrangianSystem& sys, double t,
                                  const Eigen::VectorXd& q, const Eigen::VectorXd& v);

// W_ij = d^2 L / dv^i dv^j (symmetric)
Eigen::MatrixXd velocity_hessian(const LagrangianSystem& sys, double t,
                                 const Eigen::VectorXd& q, const Eigen::VectorXd& v);

// Rank analysis of the velocity Hessian via SVD.
RegularityReport regularity(const LagrangianSystem& sys, double t, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& v, double rank_tol = kDefaultRankTol);

// r_i = W_ij a^j + (d^2L/dq^j dv^i) v^j + d^2L/dt dv^i - dL/dq^i
Eigen::VectorXd euler_lagrange_residual(const LagrangianSystem& sys, double t,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                                        const Eigen::VectorXd& a);

// Damped Newton inversion of the restricted Legendre map (regular case).
Eigen::VectorXd legendre_invert(const LagrangianSystem& sys, double t, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& p, const Eigen::VectorXd& v_guess,
                                double newton_tol = kDefaultNewtonTol,
                                int max_iter = kDefaultNewtonMaxIter);

// H = p_i v^i - L at v = FL^{-1}(t, q, p)
double hamiltonian(const LagrangianSystem& sys, double t, const Eigen::VectorXd& q,
                   const Eigen::VectorXd& p, const Eigen::VectorXd& v_guess,
                   double newton_tol = kDefaultNewtonTol, int max_iter = kDefaultNewtonMaxIter);

struct HamiltonianGradient {
  double value = 0.0;
  Eigen::VectorXd dH_dq;
  Eigen::VectorXd dH_dp;
  Eigen::VectorXd v;   // the inverted velocity
};

// H and its partials.  At v = FL^{-1}(t,q,p) the implicit terms drop out:
// dH/dp = v and dH/dq = -dL/dq evaluated there.
HamiltonianGradient hamiltonian_with_gradient(const LagrangianSystem& sys, double t,
                                              const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                              const Eigen::VectorXd& v_guess,
                                              double newton_tol = kDefaultNewtonTol,
                                              int max_iter = kDefaultNewtonMaxIter);

}  // namespace srusk

#endif
