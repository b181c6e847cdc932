#pragma once

#include <string>
#include <vector>

#include "tdpod/assembly.hpp"

namespace tdpod {

/// Value and first three derivatives of a univariate function.
struct Jet3 {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

Jet3 operator*(const Jet3& a, const Jet3& b);
Jet3 operator*(double s, const Jet3& a);
Jet3 sin(const Jet3& a);
Jet3 cos(const Jet3& a);

/// Divergence-free velocity from a stream function that vanishes together
/// with its normal derivative on the unit square:
///   psi(x, y, t) = sum_m alpha_m cos(omega_m t + theta_m) b_{p_m}(x) b_{q_m}(y),
///   b_p(s) = sin^2(pi s) cos(p pi s),   u = (d psi/dy, -d psi/dx).
/// Pressure cos(pi x) cos(pi y) (1 + sin t)/2 has zero mean.
class ManufacturedFlow {
 public:
  struct Mode {
    double alpha;
    int p;
    int q;
    double omega;
    double phase;
  };

  /// Nine modes (p, q in {0, 1, 2}) with geometrically decaying amplitude.
  static ManufacturedFlow standard();
  explicit ManufacturedFlow(std::vector<Mode> modes, double pressure_scale = 1.0);

  VelocitySample velocity(const Point& x, double t) const;
  std::array<double, 2> velocity_dt(const Point& x, double t) const;
  std::array<double, 2> velocity_dtt(const Point& x, double t) const;
  double pressure(const Point& x, double t) const;
  /// f = u_t - nu Lap u + (u . grad) u + grad p.
  std::array<double, 2> forcing(const Point& x, double t, double nu) const;

  const std::vector<Mode>& modes() const { return modes_; }

 private:
  std::vector<Mode> modes_;
  double pressure_scale_;
};

/// Data of one flow problem on the unit square with no-slip walls.
struct FlowProblem {
  std::string name;
  VectorField forcing;           // empty -> zero forcing
  VectorField initial_velocity;  // empty -> zero initial data
  ExactVelocity exact;           // empty when no closed form exists
};

/// Manufactured solution above, forcing consistent with viscosity `nu`.
FlowProblem manufactured_problem(double nu);
/// Zero forcing and zero initial data.
FlowProblem zero_problem();
/// Zero forcing, initial data from the manufactured field at t = 0.
FlowProblem decaying_problem();

FlowProblem problem_by_name(const std::string& name, double nu);

}  // namespace tdpod
