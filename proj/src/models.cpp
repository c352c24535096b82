#include "srusk/models.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "srusk/errors.hpp"

namespace srusk {

ScalarField make_sigma(const std::string& name, double c2, double c4) {
  const Expr u = Expr::variable(1);
  if (name == "zero") return ScalarField(2, Expr(0.0));
  if (name == "linear") return ScalarField(2, 0.5 * c2 * u * u);
  if (name == "quartic") return ScalarField(2, 0.5 * c2 * u * u + 0.25 * c4 * powi(u, 4));
  throw UnknownModel("unknown stress function: " + name);
}

ScalarField make_g(const std::string& name, double c) {
  const Expr u = Expr::variable(1);
  if (name == "zero") return ScalarField(2, Expr(0.0));
  if (name == "sine_gordon") return ScalarField(2, c * (1.0 - cos(u)));
  throw UnknownModel("unknown potential function: " + name);
}

namespace {

void check_wave_params(const WaveModelParams& p) {
  if (p.N < 2) throw EngineError("wave model needs N >= 2");
  if (p.K <= 0.0) throw EngineError("wave model needs K > 0");
  if (!p.sigma.valid() || p.sigma.arity() != 2 || !p.g_pot.valid() || p.g_pot.arity() != 2)
    throw EngineError("wave model needs sigma(t,u_x) and g(t,u) of arity 2");
}

}  // namespace

LagrangianSystem semidiscrete_wave(const WaveModelParams& params) {
  check_wave_params(params);
  const int N = params.N;
  const int n = N + 1;
  const double h = params.h();

  const Expr t = Expr::variable(0);
  auto q = [&](int i) { return Expr::variable(1 + i); };
  auto v = [&](int i) { return Expr::variable(1 + n + i); };

  auto link = [&](int i, int j) {  // between grid points i and j
    const Expr vmid = (v(i) + v(j)) / 2.0;
    const Expr w = (q(j) - q(i)) / h;
    const Expr qmid = (q(j) + q(i)) / 2.0;
    Expr term = 0.5 * vmid * vmid;
    term = term - substitute(params.sigma.body(), {t, w});
    term = term - substitute(params.g_pot.body(), {t, qmid});
    return term;
  };

  Expr L(0.0);
  for (int i = 0; i < N; ++i) L = L + link(i, i + 1);
  if (params.closed_chain) L = L + link(N, 0);
  return LagrangianSystem(n, ScalarField(2 * n + 1, L), "wave");
}

std::vector<ConstraintFunction> wave_reference_constraints(const WaveModelParams& params) {
  check_wave_params(params);
  const int N = params.N;
  const int n = N + 1;
  const double h = params.h();
  const LagrangianSystem sys = semidiscrete_wave(params);

  const Expr t = Expr::variable(0);
  auto q = [&](int i) { return Expr::variable(1 + i); };
  auto v = [&](int i) { return Expr::variable(1 + n + i); };

  const Expr sig_u = derivative(params.sigma.body(), 1);
  const Expr sig_ut = derivative(sig_u, 0);
  const Expr sig_uu = derivative(sig_u, 1);

  std::vector<ConstraintFunction> out = primary_level(sys);

  Expr level2(0.0);
  Expr level3(0.0);
  for (int i = 0; i < N; ++i) {
    const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
    const Expr w = (q(i + 1) - q(i)) / h;
    level2 = level2 + sgn * substitute(sig_u, {t, w});
    level3 = level3 +
             sgn * (substitute(sig_ut, {t, w}) + ((v(i + 1) - v(i)) / h) * substitute(sig_uu, {t, w}));
  }

  ConstraintFunction c2;
  c2.id = n;
  c2.level = 2;
  c2.f = ScalarField(3 * n + 1, level2);
  c2.provenance.kind = ConstraintProvenance::Kind::Tangency;
  out.push_back(std::move(c2));

  ConstraintFunction c3;
  c3.id = n + 1;
  c3.level = 3;
  c3.f = ScalarField(3 * n + 1, level3);
  c3.provenance.kind = ConstraintProvenance::Kind::Tangency;
  out.push_back(std::move(c3));
  return out;
}

LagrangianSystem builtin(const std::string& name, const BuiltinParams& params) {
  if (name == "free_particle") {
    const int n = params.n;
    if (n < 1) throw EngineError("free_particle needs n >= 1");
    Expr L(0.0);
    for (int i = 0; i < n; ++i) {
      const Expr vi = Expr::variable(1 + n + i);
      L = L + 0.5 * vi * vi;
    }
    return LagrangianSystem(n, ScalarField(2 * n + 1, L), "free_particle");
  }
  if (name == "harmonic") {
    const Expr q = Expr::variable(1), v = Expr::variable(2);
    const double w2 = params.omega * params.omega;
    return LagrangianSystem(1, ScalarField(3, 0.5 * v * v - 0.5 * w2 * q * q), "harmonic");
  }
  if (name == "singular_toy") {
    const Expr v1 = Expr::variable(3);  // (t, q1, q2, v1, v2)
    return LagrangianSystem(2, ScalarField(5, 0.5 * v1 * v1), "singular_toy");
  }
  if (name == "wave") return semidiscrete_wave(params.wave);
  throw UnknownModel("unknown model: " + name);
}

ElOracleSamples direct_el_oracle(const LagrangianSystem& sys, double t0,
                                 const Eigen::VectorXd& q0, const Eigen::VectorXd& v0,
                                 double step, double t_end) {
  if (step <= 0.0 || t_end <= t0) throw EngineError("direct_el_oracle: bad time grid");
  const int n = sys.n;

  auto accel = [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
    const VelocityTangency vt = velocity_tangency(sys, t, q, v);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vt.W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[0] == 0.0 || sv[n - 1] < 1e-12 * sv[0])
      throw SingularHessian("direct_el_oracle: velocity Hessian is rank deficient");
    return Eigen::VectorXd(svd.solve(vt.b));
  };

  const double span = t_end - t0;
  const long long steps = std::max(1LL, static_cast<long long>(std::llround(span / step)));
  const double h = span / static_cast<double>(steps);

  ElOracleSamples out;
  double t = t0;
  Eigen::VectorXd q = q0, v = v0;
  out.t.push_back(t);
  out.q.push_back(q);
  out.v.push_back(v);
  for (long long k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1q = v, k1v = accel(t, q, v);
    const Eigen::VectorXd k2q = v + 0.5 * h * k1v, k2v = accel(t + 0.5 * h, q + 0.5 * h * k1q, v + 0.5 * h * k1v);
    const Eigen::VectorXd k3q = v + 0.5 * h * k2v, k3v = accel(t + 0.5 * h, q + 0.5 * h * k2q, v + 0.5 * h * k2v);
    const Eigen::VectorXd k4q = v + h * k3v, k4v = accel(t + h, q + h * k3q, v + h * k3v);
    q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t = t0 + static_cast<double>(k + 1) * h;
    out.t.push_back(t);
    out.q.push_back(q);
    out.v.push_back(v);
  }
  return out;
}

}  // namespace srusk
