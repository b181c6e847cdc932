#include "tdpod/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdpod/error.hpp"

namespace tdpod {

using std::numbers::pi;

Jet3 operator*(const Jet3& a, const Jet3& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}

Jet3 operator*(double s, const Jet3& a) { return {s * a.v, s * a.d1, s * a.d2, s * a.d3}; }

namespace {

// h = F(g) with F', F'', F''' given at g.v (Faa di Bruno to third order).
Jet3 compose(const Jet3& g, double f0, double f1, double f2, double f3) {
  return {f0, f1 * g.d1, f2 * g.d1 * g.d1 + f1 * g.d2, f3 * g.d1 * g.d1 * g.d1 + 3.0 * f2 * g.d1 * g.d2 + f1 * g.d3};
}

}  // namespace

Jet3 sin(const Jet3& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return compose(a, s, c, -s, -c);
}

Jet3 cos(const Jet3& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return compose(a, c, -s, -c, s);
}

ManufacturedFlow::ManufacturedFlow(std::vector<Mode> modes, double pressure_scale)
    : modes_(std::move(modes)), pressure_scale_(pressure_scale) {}

ManufacturedFlow ManufacturedFlow::standard() {
  std::vector<Mode> modes;
  const int order[9][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 1}, {1, 2}, {2, 2}};
  for (int m = 0; m < 9; ++m)
    modes.push_back({std::pow(0.5, m), order[m][0], order[m][1], 1.0 + 0.7 * m, 0.9 * m});
  return ManufacturedFlow(std::move(modes));
}

namespace {

struct Derivs {
  // psi_x, psi_y, psi_xx, psi_xy, psi_yy, psi_xxx, psi_xxy, psi_xyy, psi_yyy
  double x = 0, y = 0, xx = 0, xy = 0, yy = 0, xxx = 0, xxy = 0, xyy = 0, yyy = 0;
};

constexpr int kMaxWave = 8;

// b_p(s) = sin^2(pi s) cos(p pi s) as jets for p = 0..pmax, one sincos per call.
void profiles(double s, int pmax, Jet3* out) {
  const double sn = std::sin(pi * s), cn = std::cos(pi * s);
  const Jet3 sj{sn, pi * cn, -pi * pi * sn, -pi * pi * pi * cn};
  const Jet3 s2 = sj * sj;
  double cp = 1.0, sp = 0.0;
  for (int p = 0; p <= pmax; ++p) {
    const double w = p * pi;
    out[p] = s2 * Jet3{cp, -w * sp, -w * w * cp, w * w * w * sp};
    const double c_next = cp * cn - sp * sn;
    sp = sp * cn + cp * sn;
    cp = c_next;
  }
}

struct Profiles {
  Jet3 x[kMaxWave];
  Jet3 y[kMaxWave];
};

Profiles make_profiles(const std::vector<ManufacturedFlow::Mode>& modes, const Point& pt) {
  int pmax = 0;
  for (const auto& m : modes) pmax = std::max({pmax, m.p, m.q});
  if (pmax >= kMaxWave) fail_input("manufactured flow: wave number too large");
  Profiles pr;
  profiles(pt.x, pmax, pr.x);
  profiles(pt.y, pmax, pr.y);
  return pr;
}

// g(i) is the time amplitude of mode i.
template <class TimeFn>
Derivs stream_derivatives(const std::vector<ManufacturedFlow::Mode>& modes, const Profiles& pr, TimeFn g) {
  Derivs d;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    const Jet3& X = pr.x[m.p];
    const Jet3& Y = pr.y[m.q];
    const double a = m.alpha * g(i);
    d.x += a * X.d1 * Y.v;
    d.y += a * X.v * Y.d1;
    d.xx += a * X.d2 * Y.v;
    d.xy += a * X.d1 * Y.d1;
    d.yy += a * X.v * Y.d2;
    d.xxx += a * X.d3 * Y.v;
    d.xxy += a * X.d2 * Y.d1;
    d.xyy += a * X.d1 * Y.d2;
    d.yyy += a * X.v * Y.d3;
  }
  return d;
}

// cos and sin of omega t + phase per mode; the last time is cached since
// quadrature loops evaluate many points at one instant.
struct TimePhases {
  const void* owner = nullptr;
  double t = 0.0;
  std::vector<double> c, s;
};

const TimePhases& phases(const ManufacturedFlow* flow, double t) {
  thread_local TimePhases cache;
  if (cache.owner != flow || cache.t != t || cache.c.size() != flow->modes().size()) {
    cache.owner = flow;
    cache.t = t;
    cache.c.clear();
    cache.s.clear();
    for (const auto& m : flow->modes()) {
      cache.c.push_back(std::cos(m.omega * t + m.phase));
      cache.s.push_back(std::sin(m.omega * t + m.phase));
    }
  }
  return cache;
}

}  // namespace

VelocitySample ManufacturedFlow::velocity(const Point& x, double t) const {
  const TimePhases& ph = phases(this, t);
  const Derivs d = stream_derivatives(modes_, make_profiles(modes_, x), [&](std::size_t i) { return ph.c[i]; });
  VelocitySample s{};
  s.u[0] = d.y;
  s.u[1] = -d.x;
  s.grad[0][0] = d.xy;
  s.grad[0][1] = d.yy;
  s.grad[1][0] = -d.xx;
  s.grad[1][1] = -d.xy;
  return s;
}

std::array<double, 2> ManufacturedFlow::velocity_dt(const Point& x, double t) const {
  const TimePhases& ph = phases(this, t);
  const Derivs d = stream_derivatives(modes_, make_profiles(modes_, x), [&](std::size_t i) { return -modes_[i].omega * ph.s[i]; });
  return {d.y, -d.x};
}

std::array<double, 2> ManufacturedFlow::velocity_dtt(const Point& x, double t) const {
  const TimePhases& ph = phases(this, t);
  const Derivs d = stream_derivatives(
      modes_, make_profiles(modes_, x), [&](std::size_t i) { return -modes_[i].omega * modes_[i].omega * ph.c[i]; });
  return {d.y, -d.x};
}

double ManufacturedFlow::pressure(const Point& x, double t) const {
  return pressure_scale_ * std::cos(pi * x.x) * std::cos(pi * x.y) * 0.5 * (1.0 + std::sin(t));
}

std::array<double, 2> ManufacturedFlow::forcing(const Point& x, double t, double nu) const {
  const TimePhases& ph = phases(this, t);
  const Profiles pr = make_profiles(modes_, x);
  const Derivs d = stream_derivatives(modes_, pr, [&](std::size_t i) { return ph.c[i]; });
  const Derivs dt = stream_derivatives(modes_, pr, [&](std::size_t i) { return -modes_[i].omega * ph.s[i]; });
  const std::array<double, 2> ut{dt.y, -dt.x};
  const double u1 = d.y, u2 = -d.x;
  const double lap1 = d.xxy + d.yyy;
  const double lap2 = -(d.xxx + d.xyy);
  const double conv1 = u1 * d.xy + u2 * d.yy;
  const double conv2 = u1 * (-d.xx) + u2 * (-d.xy);
  const double ps = pressure_scale_ * 0.5 * (1.0 + std::sin(t));
  const double px = -ps * pi * std::sin(pi * x.x) * std::cos(pi * x.y);
  const double py = -ps * pi * std::cos(pi * x.x) * std::sin(pi * x.y);
  return {ut[0] - nu * lap1 + conv1 + px, ut[1] - nu * lap2 + conv2 + py};
}

FlowProblem manufactured_problem(double nu) {
  auto flow = std::make_shared<ManufacturedFlow>(ManufacturedFlow::standard());
  FlowProblem p;
  p.name = "manufactured";
  p.forcing = [flow, nu](const Point& x, double t) { return flow->forcing(x, t, nu); };
  p.initial_velocity = [flow](const Point& x, double t) {
    const auto s = flow->velocity(x, t);
    return std::array<double, 2>{s.u[0], s.u[1]};
  };
  p.exact = [flow](const Point& x, double t) { return flow->velocity(x, t); };
  return p;
}

FlowProblem zero_problem() {
  FlowProblem p;
  p.name = "zero";
  p.exact = [](const Point&, double) { return VelocitySample{}; };
  return p;
}

FlowProblem decaying_problem() {
  auto flow = std::make_shared<ManufacturedFlow>(ManufacturedFlow::standard());
  FlowProblem p;
  p.name = "decaying";
  p.initial_velocity = [flow](const Point& x, double t) {
    const auto s = flow->velocity(x, t);
    return std::array<double, 2>{s.u[0], s.u[1]};
  };
  return p;
}

FlowProblem problem_by_name(const std::string& name, double nu) {
  if (name == "manufactured") return manufactured_problem(nu);
  if (name == "zero") return zero_problem();
  if (name == "decaying") return decaying_problem();
  fail_input("unknown problem '" + name + "' (expected manufactured, zero or decaying)");
}

}  // namespace tdpod
