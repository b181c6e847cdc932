#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdpod/assembly.hpp"
#include "tdpod/manufactured.hpp"

namespace tdpod {

enum class Integrator { ImplicitEuler, Bdf2 };

Integrator parse_integrator(const std::string& s);
std::string to_string(Integrator i);

struct FomConfig {
  double nu = 1e-2;
  double mu = 0.01;
  double dt = 1.0 / 64.0;
  double final_time = 1.0;
  Integrator integrator = Integrator::Bdf2;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;

  /// Number of steps M with final_time = M * dt.
  int steps() const;
  void validate() const;
};

/// Velocities, pressures and Galerkin time derivatives at t_j = j dt.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Vector> velocities;
  std::vector<Vector> pressures;
  std::vector<Vector> derivatives;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// Grad-div stabilized Taylor-Hood Galerkin solver with no-slip walls.
/// The saddle systems carry a Lagrange multiplier row for the zero-mean
/// pressure and identity rows for the Dirichlet velocity DOFs.
class FomSolver {
 public:
  FomSolver(std::shared_ptr<const Assembler> assembler, FomConfig cfg, FlowProblem problem);
  ~FomSolver();
  FomSolver(FomSolver&&) noexcept;

  struct StepResult {
    Vector velocity;
    Vector pressure;
    int iterations = 0;
    double residual = 0.0;
    bool used_picard = false;
  };

  const FomConfig& config() const { return cfg_; }
  const FeOperators& operators() const { return ops_; }
  const Assembler& assembler() const { return *assembler_; }
  const FlowProblem& problem() const { return problem_; }

  /// One implicit Euler step (u_prevprev empty) or BDF2 step.
  StepResult step(const Vector& u_prev, const Vector* u_prevprev, double t_new,
                  const Vector* pressure_guess = nullptr) const;

  /// u_{h,t} from the semi-discrete momentum equation tested against the
  /// discretely divergence-free space. Optionally returns the pressure.
  Vector galerkin_time_derivative(const Vector& u, double t, Vector* pressure = nullptr) const;

  /// Mass-orthogonal projection onto {v : B v = 0, v = 0 on the boundary}.
  Vector leray_project(const Vector& u) const;

  /// Discretely divergence-free interpolant of the problem's initial data.
  Vector initial_velocity() const;

  Vector load(double t) const;

  Trajectory run() const;
  Trajectory run(const Vector& u0) const;

 private:
  int n_total() const;
  Eigen::SparseMatrix<double> saddle_matrix(const SparseMatrix& velocity_block) const;
  struct SaddleSolver;
  const SaddleSolver& mass_saddle_lu() const;

  std::shared_ptr<const Assembler> assembler_;
  FomConfig cfg_;
  FlowProblem problem_;
  FeOperators ops_;
  SparseMatrix viscous_;  // nu A + mu G
  std::vector<char> boundary_;
  // Factorization caches; a solver instance is not safe for concurrent use.
  mutable std::unique_ptr<SaddleSolver> mass_lu_;
  mutable std::unique_ptr<SaddleSolver> jacobian_lu_;
  mutable double load_time_ = -1.0;
  mutable Vector load_cache_;
};

// Free-function entry points.
FomSolver::StepResult fom_step(const FomSolver& solver, const Vector& u_prev, const Vector* u_prevprev, double t_new);
Vector galerkin_time_derivative(const FomSolver& solver, const Vector& u, double t);
Trajectory run_fom(const FomSolver& solver);

}  // namespace tdpod
