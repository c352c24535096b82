// Batch front end: configure a model, run the constraint analysis,
// integrate trajectories, verify module properties, and inspect the
// Legendre map at a point.  Outputs are a chain report (JSON) and a
// trajectory table (CSV).
//
// Exit codes: 0 success, 1 configuration error, 2 inconsistent constraint
// system, 3 level cap reached, 4 projection failure, 5 verification
// failure, 6 undetermined vector field, 7 other engine errors.

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "srusk/config.hpp"
#include "srusk/errors.hpp"
#include "srusk/report.hpp"
#include "verify.hpp"

namespace {

using namespace srusk;

struct Overrides {
  std::optional<std::string> model, sigma, g, scheme, lambda_rule;
  std::optional<std::string> trajectory_csv, chain_report;
  std::optional<int> n, grid, max_levels, sample_count, projection_max_iter;
  std::optional<double> omega, period, step, t_end, t0, rank_tol, projection_tol;
  std::optional<std::uint64_t> seed;
  std::optional<bool> projection, closed_chain;
};

void apply(const Overrides& ov, RunConfig& rc) {
  if (ov.model) rc.model.name = *ov.model;
  if (ov.sigma) rc.model.sigma = *ov.sigma;
  if (ov.g) rc.model.g = *ov.g;
  if (ov.n) rc.model.n = *ov.n;
  if (ov.grid) rc.model.N = *ov.grid;
  if (ov.omega) rc.model.omega = *ov.omega;
  if (ov.period) rc.model.K = *ov.period;
  if (ov.closed_chain) rc.model.closed_chain = *ov.closed_chain;
  if (ov.t0) rc.initial_state.t0 = *ov.t0;
  if (ov.step) rc.integrator.step = *ov.step;
  if (ov.scheme) rc.integrator.scheme = *ov.scheme;
  if (ov.t_end) rc.integrator.t_end = *ov.t_end;
  if (ov.projection) rc.integrator.projection = *ov.projection;
  if (ov.projection_tol) rc.integrator.projection_tol = *ov.projection_tol;
  if (ov.projection_max_iter) rc.integrator.projection_max_iter = *ov.projection_max_iter;
  if (ov.lambda_rule) rc.integrator.lambda_rule = *ov.lambda_rule;
  if (ov.max_levels) rc.analysis.max_levels = *ov.max_levels;
  if (ov.rank_tol) rc.analysis.rank_tol = *ov.rank_tol;
  if (ov.sample_count) rc.analysis.sample_count = *ov.sample_count;
  if (ov.trajectory_csv) rc.outputs.trajectory_csv = *ov.trajectory_csv;
  if (ov.chain_report) rc.outputs.chain_report = *ov.chain_report;
  if (ov.seed) rc.seed = *ov.seed;
}

int termination_exit_code(ChainTermination t) {
  switch (t) {
    case ChainTermination::AllDetermined:
    case ChainTermination::GaugeFreedom:
      return 0;
    case ChainTermination::Inconsistent:
      return 2;
    case ChainTermination::MaxLevelsReached:
      return 3;
  }
  return 7;
}

ConstraintChain analyze_chain(const RunConfig& rc, const LagrangianSystem& sys) {
  const auto samples = draw_samples(rc.analysis, sys.n, rc.seed);
  return run_constraint_algorithm(sys, samples, build_analysis_options(rc.analysis));
}

void write_chain_report(const RunConfig& rc, const ConstraintChain& chain) {
  std::ofstream os(rc.outputs.chain_report);
  if (!os) throw ConfigError("cannot write chain report: " + rc.outputs.chain_report);
  os << chain_report(chain, rc.model.name).dump(2) << "\n";
}

int cmd_analyze(const RunConfig& rc, std::ostream& log) {
  const LagrangianSystem sys = build_model(rc.model);
  const ConstraintChain chain = analyze_chain(rc, sys);
  write_chain_report(rc, chain);

  log << "model " << rc.model.name << " (n = " << sys.n << ")\n";
  log << "levels:";
  for (int s : chain.level_sizes()) log << " " << s;
  log << "\ntermination: " << to_string(chain.termination);
  if (chain.termination == ChainTermination::GaugeFreedom)
    log << " (free directions: " << chain.gauge_dim << ")";
  log << "\nkernel dimension: " << chain.kernel_dim
      << ", kernel drift: " << chain.kernel_drift << "\n";
  for (const auto& rep : chain.level_reports)
    log << "level " << rep.level << ": size " << rep.size << ", max residual "
        << rep.max_residual << "\n";
  log << "report: " << rc.outputs.chain_report << "\n";
  return termination_exit_code(chain.termination);
}

int cmd_integrate(const RunConfig& rc, std::ostream& log) {
  const LagrangianSystem sys = build_model(rc.model);
  const ConstraintChain chain = analyze_chain(rc, sys);
  write_chain_report(rc, chain);
  const int chain_code = termination_exit_code(chain.termination);
  if (chain_code != 0) {
    log << "constraint analysis ended with " << to_string(chain.termination)
        << "; not integrating\n";
    return chain_code;
  }

  const UnifiedPoint pt0 = build_initial_state(rc.initial_state, sys);
  const Trajectory traj = integrate(sys, chain, pt0, build_integrator_options(rc.integrator));

  std::ofstream os(rc.outputs.trajectory_csv);
  if (!os) throw ConfigError("cannot write trajectory: " + rc.outputs.trajectory_csv);
  write_csv(traj, os);

  const auto summary = trajectory_summary(traj);
  log << "integrated " << traj.points.size() - 1 << " steps of " << traj.step << " to t = "
      << traj.points.back().t << "\n";
  log << "max constraint residual: " << summary["max_constraint_residual"].get<double>() << "\n";
  log << "max EL residual: " << summary["max_el_residual"].get<double>() << "\n";
  log << "energy drift: " << summary["energy_drift"].get<double>() << "\n";
  log << "final q:";
  for (int i = 0; i < sys.n; ++i) log << " " << traj.points.back().q[i];
  log << "\ntrajectory: " << rc.outputs.trajectory_csv << "\n";
  return 0;
}

int cmd_verify(const RunConfig& rc, std::ostream& log) {
  const auto results = run_verification(rc);
  bool any_failed = false;
  for (const auto& r : results) {
    const char* tag = r.status == CheckResult::Status::Pass   ? "PASS"
                      : r.status == CheckResult::Status::Fail ? "FAIL"
                                                              : "SKIP";
    log << "[" << tag << "] " << r.name;
    if (!r.detail.empty()) log << " (" << r.detail << ")";
    log << "\n";
    if (r.status == CheckResult::Status::Fail) {
      if (!any_failed) std::cerr << "verification failed: " << r.name << "\n";
      any_failed = true;
    }
  }
  return any_failed ? 5 : 0;
}

int cmd_legendre(const RunConfig& rc, std::ostream& log) {
  const LagrangianSystem sys = build_model(rc.model);
  const UnifiedPoint pt0 = build_initial_state(rc.initial_state, sys);
  const auto em = legendre_extended(sys, pt0.t, pt0.q, pt0.v);
  const auto rep = regularity(sys, pt0.t, pt0.q, pt0.v, rc.analysis.rank_tol);

  log << "model " << rc.model.name << " at t = " << pt0.t << "\n";
  log << "p:";
  for (int i = 0; i < sys.n; ++i) log << " " << em.p[i];
  log << "\np_energy: " << em.p_energy << "\n";
  log << "velocity hessian singular values:";
  for (int i = 0; i < rep.singular_values.size(); ++i) log << " " << rep.singular_values[i];
  log << "\nclassification: "
      << (rep.classification == Regularity::Regular ? "Regular" : "Singular") << "\n";
  if (!rep.kernel_basis.empty()) {
    log << "kernel dimension: " << rep.kernel_basis.size() << "\n";
    for (const auto& k : rep.kernel_basis) {
      log << "kernel direction:";
      for (int i = 0; i < k.size(); ++i) log << " " << k[i];
      log << "\n";
    }
  }
  return 0;
}

int run_single(const std::string& cmd, const std::string& config_path, const Overrides& ov,
               std::ostream& log) {
  RunConfig rc;
  try {
    rc = load_config(config_path);
    apply(ov, rc);
    if (cmd == "analyze") return cmd_analyze(rc, log);
    if (cmd == "integrate") return cmd_integrate(rc, log);
    if (cmd == "verify") return cmd_verify(rc, log);
    if (cmd == "legendre") return cmd_legendre(rc, log);
    std::cerr << "unknown command: " << cmd << "\n";
    return 7;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ProjectionFailed& e) {
    std::cerr << "projection failed: " << e.what() << "\n";
    return 4;
  } catch (const VectorFieldUndetermined& e) {
    std::cerr << "VectorFieldUndetermined: " << e.what() << "\n";
    return 6;
  } catch (const InconsistentSystem& e) {
    std::cerr << "inconsistent constraint system: " << e.what() << "\n";
    return 2;
  } catch (const UnknownModel& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 7;
  }
}

int run_many(const std::string& cmd, const std::vector<std::string>& configs, const Overrides& ov,
             bool sweep) {
  if (configs.size() == 1 || !sweep) {
    int worst = 0;
    for (const auto& path : configs) {
      if (configs.size() > 1) std::cout << "== " << path << " ==\n";
      worst = std::max(worst, run_single(cmd, path, ov, std::cout));
    }
    return worst;
  }

  // concurrent sweep with isolated logs
  unsigned threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("SRUSK_THREADS")) {
    const long k = std::strtol(env, nullptr, 10);
    if (k >= 1) threads = static_cast<unsigned>(k);
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));

  std::vector<std::ostringstream> logs(configs.size());
  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= configs.size()) return;
      codes[k] = run_single(cmd, configs[k], ov, logs[k]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int worst = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::cout << "== " << configs[k] << " ==\n" << logs[k].str();
    worst = std::max(worst, codes[k]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unified-formalism engine for time-dependent mechanics"};
  app.require_subcommand(1);

  Overrides ov;
  std::vector<std::string> configs;
  bool sweep = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", configs, "run configuration (.json or .toml)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_flag("--sweep", sweep, "run the given configs concurrently");
    sub->add_option("--model", ov.model, "model name");
    sub->add_option("--n", ov.n, "free particle dimension");
    sub->add_option("--omega", ov.omega, "harmonic frequency");
    sub->add_option("--N", ov.grid, "wave grid intervals");
    sub->add_option("--K", ov.period, "wave spatial period");
    sub->add_option("--sigma", ov.sigma, "stress function name");
    sub->add_option("--g", ov.g, "potential function name");
    sub->add_option("--t0", ov.t0, "initial time");
    sub->add_option("--step", ov.step, "integration step");
    sub->add_option("--scheme", ov.scheme, "rk4 or euler");
    sub->add_option("--t-end", ov.t_end, "final time");
    sub->add_option("--projection", ov.projection, "post-step projection on/off");
    sub->add_option("--projection-tol", ov.projection_tol, "projection tolerance");
    sub->add_option("--projection-max-iter", ov.projection_max_iter, "projection iterations");
    sub->add_option("--lambda-rule", ov.lambda_rule, "none or zero");
    sub->add_option("--max-levels", ov.max_levels, "constraint level cap");
    sub->add_option("--rank-tol", ov.rank_tol, "relative rank tolerance");
    sub->add_option("--sample-count", ov.sample_count, "analysis sample points");
    sub->add_option("--seed", ov.seed, "sample generator seed");
    sub->add_option("--trajectory-csv", ov.trajectory_csv, "trajectory output path");
    sub->add_option("--chain-report", ov.chain_report, "chain report output path");
  };

  add_common(app.add_subcommand("analyze", "discover the constraint chain"));
  add_common(app.add_subcommand("integrate", "integrate on the final constraint set"));
  add_common(app.add_subcommand("verify", "run the module property checks"));
  add_common(app.add_subcommand("legendre", "print the Legendre data at the initial state"));

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();
  return run_many(cmd, configs, ov, sweep);
}
