#ifndef SRUSK_CONFIG_HPP
#define SRUSK_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "srusk/integrator.hpp"
#include "srusk/models.hpp"

// Run configuration for the batch front end.  A run is described by one
// JSON or TOML file (auto-detected by extension); command-line flags
// override individual keys.

namespace srusk {

struct ModelConfig {
  std::string name = "harmonic";
  int n = 1;               // free_particle dimension
  double omega = 1.0;      // harmonic frequency
  int N = 4;               // wave grid intervals
  double K = 1.0;          // wave spatial period
  std::string sigma = "quartic";
  double sigma_c2 = 1.0;
  double sigma_c4 = 1.0;
  std::string g = "zero";
  double g_c = 1.0;
  bool closed_chain = false;
};

struct InitialStateConfig {
  double t0 = 0.0;
  std::vector<double> q;
  std::vector<double> v;
  std::vector<double> p;   // empty: momenta from the Legendre map
};

struct IntegratorConfig {
  double step = 1e-3;
  std::string scheme = "rk4";        // rk4 | euler
  double t_end = 1.0;
  bool projection = true;
  double projection_tol = 1e-10;
  int projection_max_iter = 25;
  std::string lambda_rule = "none";  // none | zero
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

struct AnalysisConfig {
  int max_levels = 8;
  double rank_tol = 1e-9;
  int sample_count = 32;
  Interval box_t{0.0, 1.0};
  Interval box_q{-1.0, 1.0};
  Interval box_v{-1.0, 1.0};
  Interval box_p{-1.0, 1.0};
};

struct OutputConfig {
  std::string trajectory_csv = "trajectory.csv";
  std::string chain_report = "chain.json";
};

struct RunConfig {
  ModelConfig model;
  InitialStateConfig initial_state;
  IntegratorConfig integrator;
  AnalysisConfig analysis;
  OutputConfig outputs;
  std::uint64_t seed = 1;
};

// Throws ConfigError on parse or validation problems.
RunConfig load_config(const std::string& path);

LagrangianSystem build_model(const ModelConfig& mc);

// Deterministic sample points in the configured box (portable generator).
std::vector<UnifiedPoint> draw_samples(const AnalysisConfig& ac, int n, std::uint64_t seed);

UnifiedPoint build_initial_state(const InitialStateConfig& ic, const LagrangianSystem& sys);

IntegratorOptions build_integrator_options(const IntegratorConfig& ic);

AnalysisOptions build_analysis_options(const AnalysisConfig& ac);

}  // namespace srusk

#endif
