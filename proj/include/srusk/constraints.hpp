#ifndef SRUSK_CONSTRAINTS_HPP
#define SRUSK_CONSTRAINTS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "srusk/unified.hpp"

// The iterative tangency algorithm.  Starting from the primary constraints
// p_i - dL/dv^i, each round demands that the dynamical vector field be
// tangent to the current constraint set.  Directions in which the tangency
// system is unsolvable yield new constraint functions; directions in which
// it is solvable determine free coefficients.  The loop ends when every
// coefficient is determined, when genuinely free (gauge) directions remain,
// when a condition has no zero set, or at the level cap.

namespace srusk {

struct ConstraintProvenance {
  enum class Kind { Primary, Tangency };
  Kind kind = Kind::Primary;
  int primary_index = -1;        // Primary: which momentum component
  std::vector<int> parent_ids;   // Tangency: the active constraints, row order
  Eigen::VectorXd direction;     // Tangency: frozen left-null direction over the rows
};

struct ConstraintFunction {
  int id = -1;
  int level = 0;        // 1 = primary
  ScalarField f;        // arity 3n+1, coordinates (t, q, v, p)
  ConstraintProvenance provenance;
};

enum class ChainTermination { AllDetermined, GaugeFreedom, Inconsistent, MaxLevelsReached };

std::string to_string(ChainTermination t);

struct LevelReport {
  int level = 0;
  int size = 0;
  double max_residual = 0.0;    // over the final sample points
  double mean_residual = 0.0;
};

struct ConstraintChain {
  int n = 0;
  std::vector<std::vector<ConstraintFunction>> levels;
  ChainTermination termination = ChainTermination::MaxLevelsReached;
  int gauge_dim = 0;                        // only meaningful for GaugeFreedom
  std::vector<UnifiedPoint> sample_points;  // projected onto the final zero set
  UnifiedPoint base_point;
  std::vector<LevelReport> level_reports;
  int kernel_dim = 0;          // dim ker W at the base point
  double kernel_drift = 0.0;   // max sine of the kernel angle across samples
  bool free_dim_varies = false;

  std::vector<const ConstraintFunction*> all() const;
  std::vector<int> level_sizes() const;
  int total() const;

  // Largest constraint violation at a point.
  double residual(const UnifiedPoint& pt) const;
};

struct AnalysisOptions {
  int max_levels = 8;
  double rank_tol = kDefaultRankTol;
  double on_tol = kOnManifoldTol;      // membership tolerance for inputs
  double detect_tol = 1e-6;            // relative size of a genuine violation
  double indep_tol = 1e-6;             // gradient independence filter
  double direction_cleanup = 1e-8;     // drop components of u below this (relative)
  double proj_tol = 1e-12;             // Newton tolerance when projecting samples
  int proj_max_iter = 60;
};

// Primary level: p_i - dL/dv^i as differentiable fields on (t, q, v, p).
std::vector<ConstraintFunction> primary_level(const LagrangianSystem& sys);

// Least-norm Newton projection of pt onto the zero set of the given
// constraints, correcting only the coordinates enabled in mask (length
// 3n+1, order t,q,v,p).  Throws NoConvergence.
UnifiedPoint project_onto_constraints(const std::vector<const ConstraintFunction*>& constraints,
                                      const UnifiedPoint& pt, const std::vector<bool>& mask,
                                      double tol, int max_iter);

// Tangency of every active constraint along X0 as an affine function of the
// free coefficients: d(phi)(X0(lambda)) = A + B lambda.
struct TangencySystem {
  Eigen::VectorXd A;   // m, uses G_particular
  Eigen::MatrixXd B;   // m x k, columns over the kernel directions
};

TangencySystem tangency_system(const LagrangianSystem& sys, const ConstraintChain& chain,
                               const UnifiedPoint& pt, double rank_tol = kDefaultRankTol);

enum class ExtendOutcome { Extended, Terminated };

// One round of the algorithm; appends a level or fixes the termination.
ExtendOutcome extend_chain(const LagrangianSystem& sys, ConstraintChain& chain,
                           const AnalysisOptions& opts);

// Full algorithm.  Sample points are projected onto the primary set first;
// rank decisions are made on-manifold at these points.
ConstraintChain run_constraint_algorithm(const LagrangianSystem& sys,
                                         const std::vector<UnifiedPoint>& sample_points,
                                         const AnalysisOptions& opts);

ConstraintChain run_constraint_algorithm(const LagrangianSystem& sys,
                                         const std::vector<UnifiedPoint>& sample_points,
                                         int max_levels, double rank_tol);

}  // namespace srusk

#endif
