#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "tdpod/fom_solver.hpp"
#include "tdpod/pod.hpp"

namespace tdpod {

/// Galerkin compression of the grad-div momentum equation onto span{phi_1..phi_r},
/// optionally around a fixed offset field (u = offset + sum_k a_k phi_k).
struct RomOperators {
  int r = 0;
  double nu = 0.0;
  double mu = 0.0;
  Eigen::MatrixXd mass;       // (phi_j, phi_i)
  Eigen::MatrixXd stiffness;  // (grad phi_j, grad phi_i)
  Eigen::MatrixXd grad_div;   // (div phi_j, div phi_i)
  /// tensor[(i r + j) r + k] = b(phi_j, phi_k, phi_i)
  std::vector<double> tensor;

  bool has_offset = false;
  Vector offset;
  Eigen::VectorXd offset_constant;  // (nu A + mu G) offset + b(offset, offset, .) tested with phi_i
  Eigen::MatrixXd offset_linear;    // b(offset, phi_j, phi_i) + b(phi_j, offset, phi_i)

  double t(int i, int j, int k) const { return tensor[(static_cast<std::size_t>(i) * r + j) * r + k]; }
  /// c_i = sum_{j,k} T[i][j][k] a_j a_k
  Eigen::VectorXd convection(const Eigen::VectorXd& a) const;
  Eigen::MatrixXd convection_jacobian(const Eigen::VectorXd& a) const;
  /// Steady part of the reduced residual: (nu A + mu G) a + b(u, u, .) with offset terms.
  Eigen::VectorXd spatial_residual(const Eigen::VectorXd& a) const;
};

RomOperators build_rom_operators(const Assembler& assembler, const FeOperators& ops, const PodBasis& basis,
                                 double nu, double mu, const Vector* offset = nullptr);

struct RomConfig {
  double dt = 1.0 / 64.0;
  double final_time = 1.0;
  Integrator integrator = Integrator::Bdf2;
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  int steps() const;
};

/// Reduced load (f(t), phi_i); empty for zero forcing.
using ReducedLoad = std::function<Eigen::VectorXd(double)>;

ReducedLoad make_reduced_load(const FomSolver& fom, const PodBasis& basis);

struct RomStepResult {
  Eigen::VectorXd coords;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Implicit Euler step (a_prevprev null) or BDF2 step of the reduced system.
RomStepResult rom_step(const RomOperators& ops, const Eigen::VectorXd& a_prev, const Eigen::VectorXd* a_prevprev,
                       double dt, const Eigen::VectorXd& load, double newton_tol = 1e-12, int max_iter = 30);

struct RomTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> coords;
};

RomTrajectory run_rom(const RomOperators& ops, const ReducedLoad& load, const Eigen::VectorXd& a0,
                      const RomConfig& cfg);

/// Lifted fields offset + sum_k a_k phi_k for every time level.
std::vector<Vector> lift_trajectory(const RomOperators& ops, const PodBasis& basis, const RomTrajectory& tr);

/// Default initial coordinates: X-projection of (u0 - offset).
Eigen::VectorXd initial_coordinates(const PodBasis& basis, const InnerProduct& x, const Vector& u0,
                                    const Vector* offset = nullptr);

double mass_norm(const RomOperators& ops, const Eigen::VectorXd& a);

}  // namespace tdpod
