#include "tdpod/rom_solver.hpp"

#include <cmath>
#include <sstream>

#include "tdpod/error.hpp"

namespace tdpod {

namespace {

Eigen::MatrixXd compress(const SparseMatrix& op, const Eigen::MatrixXd& phi) {
  const Eigen::MatrixXd applied = op * phi;
  Eigen::MatrixXd m = phi.transpose() * applied;
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd basis_matrix(const PodBasis& basis) {
  const auto n = basis.modes.front().size();
  Eigen::MatrixXd phi(n, basis.r);
  for (int k = 0; k < basis.r; ++k) phi.col(k) = basis.modes[static_cast<std::size_t>(k)];
  return phi;
}

}  // namespace

Eigen::VectorXd RomOperators::convection(const Eigen::VectorXd& a) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(r);
  for (int i = 0; i < r; ++i) {
    double s = 0.0;
    for (int j = 0; j < r; ++j) {
      const double* row = &tensor[(static_cast<std::size_t>(i) * r + j) * r];
      double inner = 0.0;
      for (int k = 0; k < r; ++k) inner += row[k] * a[k];
      s += a[j] * inner;
    }
    c[i] = s;
  }
  return c;
}

Eigen::MatrixXd RomOperators::convection_jacobian(const Eigen::VectorXd& a) const {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        const double v = t(i, j, k);
        jac(i, j) += v * a[k];
        jac(i, k) += v * a[j];
      }
  return jac;
}

Eigen::VectorXd RomOperators::spatial_residual(const Eigen::VectorXd& a) const {
  Eigen::VectorXd res = (nu * stiffness + mu * grad_div) * a + convection(a);
  if (has_offset) res += offset_constant + offset_linear * a;
  return res;
}

RomOperators build_rom_operators(const Assembler& assembler, const FeOperators& ops, const PodBasis& basis,
                                 double nu, double mu, const Vector* offset) {
  if (basis.modes.empty()) fail_input("build_rom_operators: empty basis");
  if (basis.modes.front().size() != ops.mass.rows())
    fail_input("build_rom_operators: basis and FE operators live on different spaces");
  RomOperators rom;
  rom.r = basis.r;
  rom.nu = nu;
  rom.mu = mu;
  const Eigen::MatrixXd phi = basis_matrix(basis);
  rom.mass = compress(ops.mass, phi);
  rom.stiffness = compress(ops.stiffness, phi);
  rom.grad_div = compress(ops.grad_div, phi);

  const int r = rom.r;
  rom.tensor.assign(static_cast<std::size_t>(r) * r * r, 0.0);
  for (int j = 0; j < r; ++j) {
    // N(phi_j)_{ab} = b(phi_j, psi_b, psi_a), so T[i][j][k] = phi_i^T N(phi_j) phi_k
    const Eigen::MatrixXd applied = assembler.convection(basis.modes[static_cast<std::size_t>(j)]) * phi;
    const Eigen::MatrixXd block = phi.transpose() * applied;
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < r; ++k) rom.tensor[(static_cast<std::size_t>(i) * r + j) * r + k] = block(i, k);
  }

  if (offset) {
    if (offset->size() != ops.mass.rows()) fail_input("build_rom_operators: offset has wrong size");
    rom.has_offset = true;
    rom.offset = *offset;
    const Vector steady =
        nu * (ops.stiffness * *offset) + mu * (ops.grad_div * *offset) + assembler.convection_apply(*offset, *offset);
    rom.offset_constant = phi.transpose() * steady;
    const SparseMatrix lin = assembler.convection_jacobian(*offset);
    rom.offset_linear = phi.transpose() * (lin * phi);
  }
  return rom;
}

int RomConfig::steps() const { return static_cast<int>(std::lround(final_time / dt)); }

ReducedLoad make_reduced_load(const FomSolver& fom, const PodBasis& basis) {
  if (!fom.problem().forcing) return {};
  const Eigen::MatrixXd phi = basis_matrix(basis);
  return [&fom, phi](double t) -> Eigen::VectorXd { return phi.transpose() * fom.load(t); };
}

RomStepResult rom_step(const RomOperators& ops, const Eigen::VectorXd& a_prev, const Eigen::VectorXd* a_pp, double dt,
                       const Eigen::VectorXd& load, double newton_tol, int max_iter) {
  double a0 = 1.0;
  Eigen::VectorXd history = a_prev;
  Eigen::VectorXd a = a_prev;
  if (a_pp) {
    a0 = 1.5;
    history = 2.0 * a_prev - 0.5 * (*a_pp);
    a = 2.0 * a_prev - *a_pp;
  }
  const Eigen::VectorXd fixed = load + ops.mass * history / dt;
  const Eigen::MatrixXd linear = (a0 / dt) * ops.mass + ops.nu * ops.stiffness + ops.mu * ops.grad_div +
                                 (ops.has_offset ? ops.offset_linear : Eigen::MatrixXd::Zero(ops.r, ops.r));
  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd res = (a0 / dt) * (ops.mass * x) + ops.spatial_residual(x) - fixed;
    return res;
  };
  const double scale = std::max(1.0, fixed.norm());

  RomStepResult out;
  Eigen::VectorXd res = residual(a);
  out.residual_history.push_back(res.norm());
  int it = 0;
  while (!(res.norm() <= newton_tol * scale)) {
    if (it == max_iter) {
      std::ostringstream os;
      os << "reduced Newton did not converge; residual history:";
      for (double v : out.residual_history) os << ' ' << v;
      fail_numerical(os.str());
    }
    const Eigen::MatrixXd jac = linear + ops.convection_jacobian(a);
    a -= jac.partialPivLu().solve(res);
    res = residual(a);
    out.residual_history.push_back(res.norm());
    if (!res.allFinite()) fail_numerical("reduced Newton produced non-finite residual");
    ++it;
  }
  out.coords = a;
  out.iterations = it;
  return out;
}

RomTrajectory run_rom(const RomOperators& ops, const ReducedLoad& load, const Eigen::VectorXd& a0,
                      const RomConfig& cfg) {
  if (a0.size() != ops.r) fail_input("run_rom: initial coordinates have wrong size");
  if (!(cfg.dt > 0.0)) fail_input("run_rom: time step must be positive");
  const int m = cfg.steps();
  RomTrajectory tr;
  tr.dt = cfg.dt;
  tr.times.push_back(0.0);
  tr.coords.push_back(a0);
  for (int j = 1; j <= m; ++j) {
    const double t = j * cfg.dt;
    const bool bdf2 = cfg.integrator == Integrator::Bdf2 && j >= 2;
    const Eigen::VectorXd f = load ? load(t) : Eigen::VectorXd::Zero(ops.r);
    RomStepResult s;
    try {
      s = rom_step(ops, tr.coords[static_cast<std::size_t>(j - 1)],
                   bdf2 ? &tr.coords[static_cast<std::size_t>(j - 2)] : nullptr, cfg.dt, f, cfg.newton_tol,
                   cfg.newton_max_iter);
    } catch (const Error& e) {
      throw Error(e.kind(), "ROM step " + std::to_string(j) + ": " + e.what());
    }
    tr.times.push_back(t);
    tr.coords.push_back(std::move(s.coords));
  }
  return tr;
}

std::vector<Vector> lift_trajectory(const RomOperators& ops, const PodBasis& basis, const RomTrajectory& tr) {
  std::vector<Vector> out;
  out.reserve(tr.coords.size());
  for (const auto& a : tr.coords) {
    Vector u = lift(basis, a);
    if (ops.has_offset) u += ops.offset;
    out.push_back(std::move(u));
  }
  return out;
}

Eigen::VectorXd initial_coordinates(const PodBasis& basis, const InnerProduct& x, const Vector& u0,
                                    const Vector* offset) {
  return project_onto_basis(basis, x, offset ? Vector(u0 - *offset) : u0).coords;
}

double mass_norm(const RomOperators& ops, const Eigen::VectorXd& a) { return std::sqrt(a.dot(ops.mass * a)); }

}  // namespace tdpod
