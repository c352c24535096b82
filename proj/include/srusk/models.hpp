#ifndef SRUSK_MODELS_HPP
#define SRUSK_MODELS_HPP

#include <string>
#include <vector>

#include "srusk/constraints.hpp"

// Bundled systems.  The central one is the semidiscrete nonlinear wave
// model: N+1 grid values with averaged velocities, stress sigma(t, u_x) and
// on-site potential g(t, u).  Its analytic constraint levels are provided
// as a golden reference for the constraint algorithm.

namespace srusk {

struct WaveModelParams {
  int N = 4;              // grid intervals; N+1 degrees of freedom
  double K = 1.0;         // spatial period
  ScalarField sigma;      // arity 2, arguments (t, u_x)
  ScalarField g_pot;      // arity 2, arguments (t, u)
  // The truncated sum runs over an open chain of N+1 points.  Setting
  // closed_chain adds the wrap-around link for studying true periodicity;
  // the golden constraint chain assumes it off.
  bool closed_chain = false;

  double h() const { return K / N; }
};

// Stress registry: "zero", "linear" (c2/2 u^2), "quartic" (c2/2 u^2 + c4/4 u^4).
ScalarField make_sigma(const std::string& name, double c2 = 1.0, double c4 = 1.0);

// Potential registry: "zero", "sine_gordon" (c (1 - cos u)).
ScalarField make_g(const std::string& name, double c = 1.0);

// n = N+1 and
// L = sum_i [ ((v^i+v^{i+1})/2)^2/2 - sigma(t,(q^{i+1}-q^i)/h) - g(t,(q^{i+1}+q^i)/2) ].
LagrangianSystem semidiscrete_wave(const WaveModelParams& params);

// Analytic constraint levels 1..3 of the wave model.
std::vector<ConstraintFunction> wave_reference_constraints(const WaveModelParams& params);

struct BuiltinParams {
  int n = 1;          // free_particle
  double omega = 1.0; // harmonic
  WaveModelParams wave;
};

// "free_particle", "harmonic", "singular_toy", "wave".
LagrangianSystem builtin(const std::string& name, const BuiltinParams& params = {});

// Samples produced by direct integration of the Euler-Lagrange equations;
// the independent oracle for the unified pipeline on regular systems.
struct ElOracleSamples {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> v;
};

ElOracleSamples direct_el_oracle(const LagrangianSystem& sys, double t0,
                                 const Eigen::VectorXd& q0, const Eigen::VectorXd& v0,
                                 double step, double t_end);

}  // namespace srusk

#endif
