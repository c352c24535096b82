#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "srusk/integrator.hpp"
#include "srusk/models.hpp"

using namespace srusk;
using namespace srusk::testing;

namespace {

ConstraintChain chain_for(const LagrangianSystem& sys, unsigned seed = 90) {
  Rng rng(seed);
  return run_constraint_algorithm(sys, random_points(rng, sys.n, 16), 8, 1e-9);
}

UnifiedPoint state(const LagrangianSystem& sys, double t, std::initializer_list<double> q,
                   std::initializer_list<double> v) {
  UnifiedPoint pt;
  pt.t = t;
  pt.q = Eigen::VectorXd(static_cast<int>(q.size()));
  pt.v = Eigen::VectorXd(static_cast<int>(v.size()));
  int i = 0;
  for (double x : q) pt.q[i++] = x;
  i = 0;
  for (double x : v) pt.v[i++] = x;
  pt.p = legendre_restricted(sys, t, pt.q, pt.v);
  return pt;
}

WaveModelParams quartic_wave(int N) {
  WaveModelParams wp;
  wp.N = N;
  wp.K = 1.0;
  wp.sigma = make_sigma("quartic");
  wp.g_pot = make_g("zero");
  return wp;
}

// Standing cosine profile: satisfies the alternating-sum conditions for even N.
UnifiedPoint wave_cosine_state(const LagrangianSystem& sys, int N, double amplitude) {
  UnifiedPoint pt;
  pt.t = 0.0;
  pt.q.resize(N + 1);
  for (int i = 0; i <= N; ++i) pt.q[i] = amplitude * std::cos(2.0 * M_PI * i / N);
  pt.v = Eigen::VectorXd::Zero(N + 1);
  pt.p = legendre_restricted(sys, pt.t, pt.q, pt.v);
  return pt;
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("harmonic oscillator closes its period") {
  LagrangianSystem sys = builtin("harmonic");
  auto chain = chain_for(sys);
  IntegratorOptions opts;
  opts.step = 1e-3;
  opts.t_end = 2.0 * M_PI;
  opts.projection.enabled = true;
  const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {1.0}, {0.0}), opts);
  CHECK(std::abs(traj.points.back().q[0] - 1.0) < 1e-6);
  CHECK(traj.points.front().t == 0.0);
}

TEST_CASE("free particle moves exactly linearly") {
  LagrangianSystem sys = builtin("free_particle");
  auto chain = chain_for(sys);
  IntegratorOptions opts;
  opts.step = 1e-3;
  opts.t_end = 1.0;
  const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {0.25}, {3.0}), opts);
  CHECK(std::abs(traj.points.back().q[0] - (0.25 + 3.0)) < 1e-12);
  CHECK(std::abs(traj.points.back().v[0] - 3.0) < 1e-13);
}

TEST_CASE("projection leaves on-chain points alone") {
  LagrangianSystem sys = builtin("harmonic");
  auto chain = chain_for(sys);
  Rng rng(91);
  const UnifiedPoint pt = random_w1_point(rng, sys);
  const UnifiedPoint proj = project_onto_chain(sys, chain, pt, 1e-10, 25);
  CHECK((pack_tqvp(proj) - pack_tqvp(pt)).norm() < 1e-14);
}

TEST_CASE("projection restores the momentum relation in one step") {
  LagrangianSystem sys = builtin("free_particle");
  auto chain = chain_for(sys);
  UnifiedPoint pt;
  pt.t = 0.0;
  pt.q = Eigen::VectorXd::Constant(1, 0.7);
  pt.v = Eigen::VectorXd::Constant(1, 3.0);
  pt.p = Eigen::VectorXd::Constant(1, 7.0);  // violates p = v
  const UnifiedPoint proj = project_onto_chain(sys, chain, pt, 1e-12, 25);
  CHECK(proj.p[0] == doctest::Approx(proj.v[0]).epsilon(1e-15));
  CHECK(std::abs(proj.p[0] - legendre_restricted(sys, proj.t, proj.q, proj.v)[0]) < 1e-15);
  CHECK(proj.q[0] == pt.q[0]);  // q never moves
  CHECK(proj.t == pt.t);
}

TEST_CASE("projection converges quadratically near the wave chain") {
  const auto wp = quartic_wave(4);
  LagrangianSystem sys = semidiscrete_wave(wp);
  auto chain = chain_for(sys, 92);
  Rng rng(93);
  for (int trial = 0; trial < 5; ++trial) {
    UnifiedPoint pt = chain.sample_points[trial % chain.sample_points.size()];
    pt.v += 1e-3 * random_vector(rng, 5);
    pt.p += 1e-3 * random_vector(rng, 5);
    // five iterations reach 1e-12 from a 1e-3 perturbation
    const UnifiedPoint proj = project_onto_chain(sys, chain, pt, 1e-12, 5);
    CHECK(chain.residual(proj) < 1e-12);
  }
}

TEST_CASE("rk4 endpoint state error drops by roughly sixteen per halving") {
  LagrangianSystem sys = builtin("harmonic");
  auto chain = chain_for(sys);
  auto endpoint_error = [&](double h) {
    IntegratorOptions opts;
    opts.step = h;
    opts.t_end = 2.0 * M_PI;
    const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {1.0}, {0.0}), opts);
    const auto& last = traj.points.back();
    return std::max(std::abs(last.q[0] - 1.0), std::abs(last.v[0]));
  };
  const double ratio = endpoint_error(2e-3) / endpoint_error(1e-3);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("euler scheme converges at first order") {
  LagrangianSystem sys = builtin("harmonic");
  auto chain = chain_for(sys);
  auto endpoint_error = [&](double h) {
    IntegratorOptions opts;
    opts.step = h;
    opts.scheme = Scheme::Euler;
    opts.t_end = 1.0;
    const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {1.0}, {0.0}), opts);
    return std::abs(traj.points.back().q[0] - std::cos(1.0));
  };
  const double ratio = endpoint_error(2e-3) / endpoint_error(1e-3);
  CHECK(ratio > 1.7);
  CHECK(ratio < 2.3);
}

TEST_CASE("energy drifts below 1e-5 on autonomous systems") {
  LagrangianSystem sys = builtin("harmonic");
  auto chain = chain_for(sys);
  IntegratorOptions opts;
  opts.step = 1e-3;
  opts.t_end = 1.0;
  const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {1.0}, {0.0}), opts);
  double emin = traj.diagnostics[0].energy, emax = emin;
  for (const auto& d : traj.diagnostics) {
    emin = std::min(emin, d.energy);
    emax = std::max(emax, d.energy);
  }
  CHECK(emax - emin < 1e-5);
}

TEST_CASE("stored velocities match the finite-difference slope of q") {
  for (const char* name : {"free_particle", "harmonic"}) {
    LagrangianSystem sys = builtin(name);
    auto chain = chain_for(sys);
    IntegratorOptions opts;
    opts.step = 1e-2;
    opts.t_end = 0.5;
    const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {1.0}, {0.4}), opts);
    const double h = traj.step;
    for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
      const double slope = (traj.points[k + 1].q[0] - traj.points[k].q[0]) / h;
      const double v_mid = 0.5 * (traj.points[k].v[0] + traj.points[k + 1].v[0]);
      CHECK(std::abs(slope - v_mid) <= 5.0 * h * h);
    }
  }
}

TEST_CASE("wave trajectories keep the chain residual small") {
  const auto wp = quartic_wave(4);
  LagrangianSystem sys = semidiscrete_wave(wp);
  auto chain = chain_for(sys, 94);
  const UnifiedPoint pt0 = wave_cosine_state(sys, 4, 0.3);

  IntegratorOptions opts;
  opts.step = 1e-3;
  opts.t_end = 0.3;
  opts.projection.enabled = true;
  opts.projection.tol = 1e-10;
  Trajectory traj = integrate(sys, chain, pt0, opts);
  double maxres = 0.0;
  for (const auto& d : traj.diagnostics) maxres = std::max(maxres, d.constraint_residual);
  CHECK(maxres < 1e-6);

  opts.projection.enabled = false;
  traj = integrate(sys, chain, pt0, opts);
  maxres = 0.0;
  for (const auto& d : traj.diagnostics) maxres = std::max(maxres, d.constraint_residual);
  CHECK(maxres < 1e-3);
}

TEST_CASE("gauge systems refuse to integrate without a rule") {
  LagrangianSystem sys = builtin("singular_toy");
  auto chain = chain_for(sys, 95);
  REQUIRE(chain.termination == ChainTermination::GaugeFreedom);
  IntegratorOptions opts;
  opts.step = 1e-2;
  opts.t_end = 1.0;
  const UnifiedPoint pt0 = state(sys, 0.0, {0.0, 0.5}, {2.0, 0.25});
  CHECK_THROWS_AS((void)integrate(sys, chain, pt0, opts), VectorFieldUndetermined);

  // with the zero rule the undetermined direction coasts
  opts.lambda_rule = LambdaRule::Zero;
  const Trajectory traj = integrate(sys, chain, pt0, opts);
  CHECK(std::abs(traj.points.back().q[0] - 2.0) < 1e-12);
  CHECK(std::abs(traj.points.back().q[1] - (0.5 + 0.25)) < 1e-12);
  CHECK(std::abs(traj.points.back().v[1] - 0.25) < 1e-12);
}

TEST_CASE("csv output round trips at full precision") {
  LagrangianSystem sys = builtin("harmonic");
  auto chain = chain_for(sys);
  IntegratorOptions opts;
  opts.step = 0.05;
  opts.t_end = 0.2;
  const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {1.0}, {0.0}), opts);

  std::ostringstream os;
  write_csv(traj, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,q0,v0,p0,constraint_residual,el_residual,energy");

  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    REQUIRE(vals.size() == 7);
    CHECK(vals[0] == traj.points[row].t);
    CHECK(vals[1] == traj.points[row].q[0]);
    CHECK(vals[2] == traj.points[row].v[0]);
    CHECK(vals[3] == traj.points[row].p[0]);
    CHECK(vals[6] == traj.diagnostics[row].energy);
    ++row;
  }
  CHECK(row == traj.points.size());
}

TEST_CASE("time grid is uniform and lands on t_end") {
  LagrangianSystem sys = builtin("free_particle");
  auto chain = chain_for(sys);
  IntegratorOptions opts;
  opts.step = 3e-3;  // does not divide the span
  opts.t_end = 1.0;
  const Trajectory traj = integrate(sys, chain, state(sys, 0.0, {0.0}, {1.0}), opts);
  CHECK(std::abs(traj.points.back().t - 1.0) < 1e-12);
  for (std::size_t k = 0; k < traj.points.size(); ++k)
    CHECK(std::abs(traj.points[k].t - static_cast<double>(k) * traj.step) < 1e-12);
}

}  // TEST_SUITE
