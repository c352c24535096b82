#include <doctest.h>

#include "helpers.hpp"
#include "srusk/models.hpp"

using namespace srusk;
using namespace srusk::testing;

namespace {

WaveModelParams quartic_wave(int N, double K = 1.0) {
  WaveModelParams wp;
  wp.N = N;
  wp.K = K;
  wp.sigma = make_sigma("quartic");
  wp.g_pot = make_g("sine_gordon");
  return wp;
}

LagrangianSystem random_kinetic_potential(Rng& rng, int n) {
  // L = v.v/2 - V(q) with a random smooth potential
  Expr L(0.0);
  for (int i = 0; i < n; ++i) {
    const Expr vi = Expr::variable(1 + n + i);
    L = L + 0.5 * vi * vi;
  }
  Expr V(0.0);
  for (int i = 0; i < n; ++i) {
    const Expr qi = Expr::variable(1 + i);
    V = V + uniform(rng, 0.2, 1.0) * cos(qi) + uniform(rng, -0.5, 0.5) * qi * qi;
  }
  return LagrangianSystem(n, ScalarField(2 * n + 1, L - V));
}

}  // namespace

TEST_SUITE("lagrangian") {

TEST_CASE("restricted legendre map on the free particle") {
  LagrangianSystem sys = builtin("free_particle");
  const Eigen::VectorXd p = legendre_restricted(sys, 0.0, Eigen::VectorXd::Zero(1),
                                                Eigen::VectorXd::Constant(1, 3.0));
  CHECK(p[0] == 3.0);
}

TEST_CASE("wave momenta follow the averaged-velocity pattern") {
  const auto wp = quartic_wave(4);
  LagrangianSystem sys = semidiscrete_wave(wp);
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, 5), v = random_vector(rng, 5);
    const Eigen::VectorXd p = legendre_restricted(sys, t, q, v);
    CHECK(std::abs(p[0] - 0.5 * (v[0] + v[1]) / 2.0) < 1e-14);
    for (int i = 1; i <= 3; ++i)
      CHECK(std::abs(p[i] - 0.25 * (v[i - 1] + 2.0 * v[i] + v[i + 1])) < 1e-14);
    CHECK(std::abs(p[4] - 0.5 * (v[3] + v[4]) / 2.0) < 1e-14);
  }
}

TEST_CASE("legendre map matches finite differences of L in v") {
  Rng rng(8);
  LagrangianSystem sys = random_kinetic_potential(rng, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, 3), v = random_vector(rng, 3);
    const Eigen::VectorXd p = legendre_restricted(sys, t, q, v);
    const Eigen::VectorXd x = pack_tqv(t, q, v);
    const Eigen::VectorXd g = fd_gradient(sys.L, x, 1e-5);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(p[i] - g[4 + i]) < 1e-8);
  }
}

TEST_CASE("extended legendre map") {
  LagrangianSystem sys = builtin("free_particle");
  const auto em = legendre_extended(sys, 0.0, Eigen::VectorXd::Zero(1),
                                    Eigen::VectorXd::Constant(1, 3.0));
  CHECK(em.p_energy == doctest::Approx(-4.5).epsilon(1e-15));
  CHECK(em.p[0] == 3.0);

  LagrangianSystem ho = builtin("harmonic");
  const auto em2 = legendre_extended(ho, 0.0, Eigen::VectorXd::Constant(1, 1.0),
                                     Eigen::VectorXd::Zero(1));
  CHECK(em2.p_energy == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(em2.p[0] == 0.0);
}

TEST_CASE("wave p_energy equals minus the unified hamiltonian function") {
  LagrangianSystem sys = semidiscrete_wave(quartic_wave(4));
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, 5), v = random_vector(rng, 5);
    const auto em = legendre_extended(sys, t, q, v);
    const double Lval = sys.L.value(pack_tqv(t, q, v));
    const double Hhat = -Lval + em.p.dot(v);
    CHECK(std::abs(em.p_energy + Hhat) < 1e-13);
  }
}

TEST_CASE("velocity hessian of a diagonal kinetic term is the identity") {
  LagrangianSystem sys = builtin("free_particle", {.n = 3});
  const Eigen::MatrixXd W =
      velocity_hessian(sys, 0.0, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3));
  CHECK((W - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("wave velocity hessian is the quarter tridiagonal matrix") {
  const int N = 6;
  LagrangianSystem sys = semidiscrete_wave(quartic_wave(N));
  Rng rng(10);
  const Eigen::MatrixXd W = velocity_hessian(sys, 0.3, random_vector(rng, N + 1),
                                             random_vector(rng, N + 1));
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    T(i, i) = (i == 0 || i == N) ? 1.0 : 2.0;
    if (i < N) T(i, i + 1) = T(i + 1, i) = 1.0;
  }
  CHECK((W - 0.25 * T).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("quadratic kinetic forms reproduce their matrix") {
  Rng rng(12);
  const int n = 4;
  Eigen::MatrixXd M = Eigen::MatrixXd::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return uniform(rng, -1.0, 1.0); });
  M = ((M + M.transpose()) / 2.0).eval();
  Expr L(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      L = L + 0.5 * M(i, j) * Expr::variable(1 + n + i) * Expr::variable(1 + n + j);
  LagrangianSystem sys(n, ScalarField(2 * n + 1, L));
  const Eigen::MatrixXd W =
      velocity_hessian(sys, 0.0, random_vector(rng, n), random_vector(rng, n));
  CHECK((W - M).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("velocity hessian routes agree") {
  // full second-order sweep vs row-wise symbolic partials
  LagrangianSystem sys = semidiscrete_wave(quartic_wave(4));
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, 5), v = random_vector(rng, 5);
    const Eigen::MatrixXd W1 = velocity_hessian(sys, t, q, v);
    const Eigen::MatrixXd W2 = velocity_tangency(sys, t, q, v).W;
    CHECK((W1 - W2).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("regularity classification") {
  Rng rng(14);
  LagrangianSystem free1 = builtin("free_particle");
  const auto rep = regularity(free1, 0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
  CHECK(rep.classification == Regularity::Regular);
  CHECK(rep.kernel_basis.empty());

  LagrangianSystem toy = builtin("singular_toy");
  const auto rep2 = regularity(toy, 0.0, random_vector(rng, 2), random_vector(rng, 2));
  CHECK(rep2.classification == Regularity::Singular);
  REQUIRE(rep2.kernel_basis.size() == 1);
  CHECK(std::abs(std::abs(rep2.kernel_basis[0][1]) - 1.0) < 1e-12);
  CHECK(std::abs(rep2.kernel_basis[0][0]) < 1e-12);
}

TEST_CASE("wave kernel is the normalized alternating vector") {
  for (int N : {2, 4, 8}) {
    LagrangianSystem sys = semidiscrete_wave(quartic_wave(N));
    Rng rng(15 + N);
    const auto rep =
        regularity(sys, 0.2, random_vector(rng, N + 1), random_vector(rng, N + 1));
    CHECK(rep.classification == Regularity::Singular);
    REQUIRE(rep.kernel_basis.size() == 1);
    Eigen::VectorXd alt(N + 1);
    for (int i = 0; i <= N; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    alt.normalize();
    CHECK(std::abs(std::abs(rep.kernel_basis[0].dot(alt)) - 1.0) < 1e-10);
  }
}

TEST_CASE("kernel basis is orthonormal") {
  // two missing velocities
  const int n = 3;
  const Expr v0 = Expr::variable(1 + n + 0);
  LagrangianSystem sys(n, ScalarField(2 * n + 1, 0.5 * v0 * v0));
  Rng rng(16);
  const auto rep = regularity(sys, 0.0, random_vector(rng, n), random_vector(rng, n));
  REQUIRE(rep.kernel_basis.size() == 2);
  CHECK(std::abs(rep.kernel_basis[0].norm() - 1.0) < 1e-12);
  CHECK(std::abs(rep.kernel_basis[1].norm() - 1.0) < 1e-12);
  CHECK(std::abs(rep.kernel_basis[0].dot(rep.kernel_basis[1])) < 1e-12);
}

TEST_CASE("regularity is invariant under rescaling of L") {
  LagrangianSystem base = semidiscrete_wave(quartic_wave(4));
  Rng rng(17);
  const double t = 0.4;
  const Eigen::VectorXd q = random_vector(rng, 5), v = random_vector(rng, 5);
  const auto rep0 = regularity(base, t, q, v);
  for (double c : {1e-3, 3.7, 1e3}) {
    LagrangianSystem scaled(5, ScalarField(11, c * base.L.body()));
    const auto rep = regularity(scaled, t, q, v);
    CHECK(rep.classification == rep0.classification);
    REQUIRE(rep.kernel_basis.size() == rep0.kernel_basis.size());
    CHECK(std::abs(std::abs(rep.kernel_basis[0].dot(rep0.kernel_basis[0])) - 1.0) < 1e-8);
  }
}

TEST_CASE("euler-lagrange residual on closed-form systems") {
  LagrangianSystem free1 = builtin("free_particle");
  CHECK(euler_lagrange_residual(free1, 0.0, Eigen::VectorXd::Zero(1),
                                Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Zero(1))
            .norm() == 0.0);

  LagrangianSystem ho = builtin("harmonic");
  const Eigen::VectorXd r =
      euler_lagrange_residual(ho, 0.0, Eigen::VectorXd::Constant(1, 1.0),
                              Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, -1.0));
  CHECK(r.norm() < 1e-15);
}

TEST_CASE("accelerations solved from the residual satisfy it") {
  Rng rng(18);
  LagrangianSystem sys = random_kinetic_potential(rng, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, 3), v = random_vector(rng, 3);
    const VelocityTangency vt = velocity_tangency(sys, t, q, v);
    const Eigen::VectorXd a = vt.W.fullPivLu().solve(vt.b);
    CHECK(euler_lagrange_residual(sys, t, q, v, a).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("residual is linear in the acceleration with coefficient W") {
  Rng rng(19);
  LagrangianSystem sys = semidiscrete_wave(quartic_wave(3));
  const double t = 0.1;
  const Eigen::VectorXd q = random_vector(rng, 4), v = random_vector(rng, 4);
  const Eigen::VectorXd a = random_vector(rng, 4);
  const Eigen::VectorXd r1 = euler_lagrange_residual(sys, t, q, v, a);
  const Eigen::VectorXd r2 = euler_lagrange_residual(sys, t, q, v, (2.0 * a).eval());
  const Eigen::MatrixXd W = velocity_hessian(sys, t, q, v);
  CHECK(((r2 - r1) - W * a).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("legendre inversion on explicit systems") {
  LagrangianSystem free1 = builtin("free_particle");
  Eigen::VectorXd v = legendre_invert(free1, 0.0, Eigen::VectorXd::Zero(1),
                                      Eigen::VectorXd::Constant(1, 3.0),
                                      Eigen::VectorXd::Zero(1));
  CHECK(std::abs(v[0] - 3.0) < 1e-12);

  // L = m v^2 / 2 with m = 2
  const Expr vv = Expr::variable(2);
  LagrangianSystem heavy(1, ScalarField(3, vv * vv));
  v = legendre_invert(heavy, 0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 3.0),
                      Eigen::VectorXd::Zero(1));
  CHECK(std::abs(v[0] - 1.5) < 1e-12);
}

TEST_CASE("legendre round trip on convex systems") {
  Rng rng(20);
  const int n = 3;
  Eigen::MatrixXd M = Eigen::MatrixXd::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return uniform(rng, -0.3, 0.3); });
  M = (M * M.transpose() + Eigen::MatrixXd::Identity(n, n)).eval();
  Expr L(0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      L = L + 0.5 * M(i, j) * Expr::variable(1 + n + i) * Expr::variable(1 + n + j);
    L = L + 0.1 * tanh(Expr::variable(1 + n + i)) - cos(Expr::variable(1 + i));
  }
  LagrangianSystem sys(n, ScalarField(2 * n + 1, L));
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, n), v = random_vector(rng, n);
    const Eigen::VectorXd p = legendre_restricted(sys, t, q, v);
    const Eigen::VectorXd v2 = legendre_invert(sys, t, q, p, Eigen::VectorXd::Zero(n));
    CHECK((v2 - v).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("legendre inversion failure modes") {
  // rank-deficient velocity Hessian
  LagrangianSystem toy = builtin("singular_toy");
  CHECK_THROWS_AS((void)legendre_invert(toy, 0.0, Eigen::VectorXd::Zero(2),
                                        Eigen::VectorXd::Constant(2, 1.0),
                                        Eigen::VectorXd::Zero(2)),
                  SingularJacobian);

  // too few iterations for a nonlinear inversion started far away
  const Expr v = Expr::variable(2);
  LagrangianSystem quart(1, ScalarField(3, 0.25 * powi(v, 4) + 0.5 * v * v));
  CHECK_THROWS_AS((void)legendre_invert(quart, 0.0, Eigen::VectorXd::Zero(1),
                                        Eigen::VectorXd::Constant(1, 100.0),
                                        Eigen::VectorXd::Zero(1), 1e-12, 1),
                  NoConvergence);
}

TEST_CASE("hamiltonian values") {
  LagrangianSystem free1 = builtin("free_particle");
  CHECK(std::abs(hamiltonian(free1, 0.0, Eigen::VectorXd::Zero(1),
                             Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Zero(1)) -
                 4.5) < 1e-12);

  LagrangianSystem ho = builtin("harmonic");
  CHECK(std::abs(hamiltonian(ho, 0.0, Eigen::VectorXd::Constant(1, 1.0),
                             Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)) -
                 0.5) < 1e-12);
}

TEST_CASE("hamiltonian is minus the extended energy coordinate") {
  Rng rng(21);
  LagrangianSystem sys = random_kinetic_potential(rng, 2);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd q = random_vector(rng, 2), v = random_vector(rng, 2);
    const auto em = legendre_extended(sys, t, q, v);
    const double H = hamiltonian(sys, t, q, em.p, v);
    CHECK(std::abs(H + em.p_energy) < 1e-9);
  }
}

}  // TEST_SUITE
