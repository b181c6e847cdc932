#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tdpod/error.hpp"
#include "tdpod/fom_solver.hpp"

using namespace tdpod;
using std::numbers::pi;

namespace {

std::shared_ptr<const Assembler> make_assembler(int n) {
  return std::make_shared<const Assembler>(build_taylor_hood(std::make_shared<const Mesh>(build_rect_mesh(n, n)), 2));
}

// Independent evaluation of the stream-function profile with jet arithmetic.
Jet3 profile_oracle(double s, int p) {
  const Jet3 x{s, 1.0, 0.0, 0.0};
  const Jet3 sn = sin(pi * x);
  return sn * sn * cos((p * pi) * x);
}

double mass_norm(const FomSolver& s, const Vector& u) { return std::sqrt(u.dot(s.operators().mass * u)); }

}  // namespace

TEST_CASE("manufactured velocity matches an independent jet evaluation") {
  const ManufacturedFlow flow = ManufacturedFlow::standard();
  for (const Point p : {Point{0.3, 0.7}, Point{0.91, 0.12}, Point{0.5, 0.5}}) {
    const double t = 0.37;
    double u0 = 0, u1 = 0, g00 = 0, g01 = 0, g10 = 0;
    for (const auto& m : flow.modes()) {
      const Jet3 X = profile_oracle(p.x, m.p), Y = profile_oracle(p.y, m.q);
      const double a = m.alpha * std::cos(m.omega * t + m.phase);
      u0 += a * X.v * Y.d1;
      u1 -= a * X.d1 * Y.v;
      g00 += a * X.d1 * Y.d1;
      g01 += a * X.v * Y.d2;
      g10 -= a * X.d2 * Y.v;
    }
    const VelocitySample s = flow.velocity(p, t);
    CHECK(s.u[0] == doctest::Approx(u0).epsilon(1e-12));
    CHECK(s.u[1] == doctest::Approx(u1).epsilon(1e-12));
    CHECK(s.grad[0][0] == doctest::Approx(g00).epsilon(1e-12));
    CHECK(s.grad[0][1] == doctest::Approx(g01).epsilon(1e-12));
    CHECK(s.grad[1][0] == doctest::Approx(g10).epsilon(1e-12));
    CHECK(std::abs(s.grad[0][0] + s.grad[1][1]) < 1e-12);
  }
}

TEST_CASE("manufactured velocity satisfies no-slip") {
  const ManufacturedFlow flow = ManufacturedFlow::standard();
  for (double s = 0; s <= 1.0; s += 0.125) {
    for (const Point p : {Point{s, 0}, Point{s, 1}, Point{0, s}, Point{1, s}}) {
      const VelocitySample v = flow.velocity(p, 0.4);
      CHECK(std::abs(v.u[0]) < 1e-14);
      CHECK(std::abs(v.u[1]) < 1e-14);
    }
  }
}

TEST_CASE("manufactured forcing agrees with finite differences of the solution") {
  const ManufacturedFlow flow = ManufacturedFlow::standard();
  const double nu = 0.03, t = 0.6, h = 1e-4;
  const Point p{0.37, 0.61};
  auto vel = [&](double x, double y, double tt) { return flow.velocity({x, y}, tt); };
  const VelocitySample c = vel(p.x, p.y, t);
  const auto fp = vel(p.x, p.y, t + h), fm = vel(p.x, p.y, t - h);
  const auto xp = vel(p.x + h, p.y, t), xm = vel(p.x - h, p.y, t);
  const auto yp = vel(p.x, p.y + h, t), ym = vel(p.x, p.y - h, t);
  const auto ut = flow.velocity_dt(p, t);
  const auto dtt = flow.velocity_dtt(p, t);
  const double pxp = flow.pressure({p.x + h, p.y}, t), pxm = flow.pressure({p.x - h, p.y}, t);
  const double pyp = flow.pressure({p.x, p.y + h}, t), pym = flow.pressure({p.x, p.y - h}, t);
  const auto f = flow.forcing(p, t, nu);
  for (int comp = 0; comp < 2; ++comp) {
    const double dt_fd = (fp.u[comp] - fm.u[comp]) / (2 * h);
    CHECK(ut[comp] == doctest::Approx(dt_fd).epsilon(1e-6));
    const double dtt_fd = (fp.u[comp] - 2 * c.u[comp] + fm.u[comp]) / (h * h);
    CHECK(std::abs(dtt[comp] - dtt_fd) < 1e-4 * (1 + std::abs(dtt[comp])));
    const double lap = (xp.u[comp] - 2 * c.u[comp] + xm.u[comp] + yp.u[comp] - 2 * c.u[comp] + ym.u[comp]) / (h * h);
    const double conv = c.u[0] * c.grad[comp][0] + c.u[1] * c.grad[comp][1];
    const double gp = comp == 0 ? (pxp - pxm) / (2 * h) : (pyp - pym) / (2 * h);
    const double expected = ut[comp] - nu * lap + conv + gp;
    CHECK(std::abs(f[comp] - expected) < 1e-5 * (1 + std::abs(expected)));
  }
}

TEST_CASE("config validation") {
  FomConfig c;
  c.dt = 0.1;
  c.final_time = 1.0;
  CHECK(c.steps() == 10);
  c.final_time = 0.95;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FomConfig{};
  c.nu = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FomConfig{};
  c.mu = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_integrator("bdf2") == Integrator::Bdf2);
  CHECK(parse_integrator("implicit_euler") == Integrator::ImplicitEuler);
  CHECK_THROWS_AS(parse_integrator("rk4"), Error);
}

TEST_CASE("zero data stays at the zero fixed point") {
  FomConfig c;
  c.dt = 0.05;
  c.final_time = 0.2;
  FomSolver s(make_assembler(3), c, zero_problem());
  const Vector z = Vector::Zero(s.assembler().space().n_velocity());
  const auto r = fom_step(s, z, nullptr, 0.05);
  CHECK(r.velocity.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.pressure.cwiseAbs().maxCoeff() == 0.0);
  CHECK(galerkin_time_derivative(s, z, 0.0).cwiseAbs().maxCoeff() == 0.0);
  const Trajectory tr = run_fom(s);
  CHECK(tr.steps() == 4);
  for (const auto& u : tr.velocities) CHECK(u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero steps keep the initial state and its derivative") {
  FomConfig c;
  c.dt = 0.1;
  c.final_time = 0.0;
  FomSolver s(make_assembler(3), c, manufactured_problem(c.nu));
  const Trajectory tr = s.run();
  CHECK(tr.steps() == 0);
  CHECK(tr.velocities.size() == 1);
  CHECK(tr.derivatives.size() == 1);
}

TEST_CASE("implicit Euler without forcing dissipates energy") {
  FomConfig c;
  c.dt = 0.02;
  c.final_time = 0.3;
  c.nu = 1e-3;
  c.integrator = Integrator::ImplicitEuler;
  FomSolver s(make_assembler(4), c, decaying_problem());
  const Trajectory tr = s.run();
  for (int j = 1; j <= tr.steps(); ++j)
    CHECK(mass_norm(s, tr.velocities[j]) <= mass_norm(s, tr.velocities[j - 1]) * (1 + 1e-12));
  // single step from an arbitrary admissible state
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  Vector v(s.assembler().space().n_velocity());
  for (auto& x : v) x = d(rng);
  const Vector u = s.leray_project(v);
  const auto r = s.step(u, nullptr, 0.02);
  CHECK(mass_norm(s, r.velocity) <= mass_norm(s, u));
}

TEST_CASE("stored states are discretely divergence free") {
  FomConfig c;
  c.dt = 0.05;
  c.final_time = 0.2;
  FomSolver s(make_assembler(4), c, manufactured_problem(c.nu));
  const Trajectory tr = s.run();
  const SparseMatrix& b = s.operators().divergence;
  for (int j = 0; j <= tr.steps(); ++j) {
    CHECK((b * tr.velocities[j]).norm() <= 1e-8 * tr.velocities[j].norm());
    CHECK((b * tr.derivatives[j]).norm() <= 1e-10 * tr.derivatives[j].norm());
    CHECK(std::abs(s.operators().pressure_mean.dot(tr.pressures[j])) < 1e-10);
  }
  for (int i : s.assembler().space().velocity().boundary_dofs()) {
    CHECK(tr.velocities[2][i] == 0.0);
    CHECK(tr.derivatives[2][i] == 0.0);
  }
}

TEST_CASE("leray projection is a mass-orthogonal projector") {
  FomConfig c;
  FomSolver s(make_assembler(3), c, manufactured_problem(c.nu));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  Vector v(s.assembler().space().n_velocity());
  for (auto& x : v) x = d(rng);
  v = s.assembler().space().zero_boundary(v);
  const Vector p = s.leray_project(v);
  CHECK((s.operators().divergence * p).norm() < 1e-10 * p.norm());
  CHECK((s.leray_project(p) - p).norm() < 1e-10 * p.norm());
  // v - Pv is mass-orthogonal to the projected space
  CHECK(std::abs((v - p).dot(s.operators().mass * p)) < 1e-10 * v.squaredNorm());
}

TEST_CASE("galerkin derivative is approached by difference quotients at first order") {
  FomConfig c;
  c.final_time = 0.1;
  c.integrator = Integrator::Bdf2;
  auto as = make_assembler(4);
  double prev = 0;
  for (int k = 0; k < 3; ++k) {
    c.dt = 0.1 / (10 << k);
    FomSolver s(as, c, manufactured_problem(c.nu));
    const Trajectory tr = s.run();
    const int m = tr.steps();
    const Vector dq = (tr.velocities[m] - tr.velocities[m - 1]) / c.dt;
    const double e = mass_norm(s, dq - tr.derivatives[m]);
    if (k > 0) {
      CHECK(prev / e > 1.6);
      CHECK(prev / e < 2.4);
    }
    prev = e;
  }
}

TEST_CASE("runs are deterministic") {
  FomConfig c;
  c.dt = 0.05;
  c.final_time = 0.15;
  auto as = make_assembler(3);
  const Trajectory a = FomSolver(as, c, manufactured_problem(c.nu)).run();
  const Trajectory b = FomSolver(as, c, manufactured_problem(c.nu)).run();
  for (int j = 0; j <= a.steps(); ++j) {
    CHECK((a.velocities[j] - b.velocities[j]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.derivatives[j] - b.derivatives[j]).cwiseAbs().maxCoeff() == 0.0);
  }
}
