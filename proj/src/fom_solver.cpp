#include "tdpod/fom_solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

#include "tdpod/error.hpp"

namespace tdpod {

Integrator parse_integrator(const std::string& s) {
  if (s == "implicit_euler" || s == "euler") return Integrator::ImplicitEuler;
  if (s == "bdf2") return Integrator::Bdf2;
  fail_input("unknown integrator '" + s + "' (expected implicit_euler or bdf2)");
}

std::string to_string(Integrator i) { return i == Integrator::Bdf2 ? "bdf2" : "implicit_euler"; }

int FomConfig::steps() const { return static_cast<int>(std::lround(final_time / dt)); }

void FomConfig::validate() const {
  if (!(nu > 0.0)) fail_input("viscosity must be positive");
  if (!(mu >= 0.0)) fail_input("grad-div parameter must be non-negative");
  if (!(dt > 0.0)) fail_input("time step must be positive");
  if (!(final_time >= 0.0)) fail_input("final time must be non-negative");
  const double m = final_time / dt;
  if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m)) fail_input("final time must be an integer multiple of dt");
  if (!(newton_tol > 0.0) || newton_max_iter < 1) fail_input("invalid Newton settings");
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;
using Lu = Eigen::SparseLU<ColMatrix>;

}  // namespace

struct FomSolver::SaddleSolver {
  Lu lu;
  bool analyzed = false;
  bool ready = false;  // holds a valid factorization
  double key = 0.0;    // time-derivative coefficient the factorization was built with

  // The symbolic analysis is kept while the sparsity pattern is unchanged.
  void factorize(const ColMatrix& a) {
    if (!analyzed) lu.analyzePattern(a);
    analyzed = true;
    ready = false;
    lu.factorize(a);
    if (lu.info() != Eigen::Success) fail_numerical("singular saddle-point system: " + lu.lastErrorMessage());
    ready = true;
  }
  Vector solve(const Vector& b) const { return lu.solve(b); }
};

FomSolver::~FomSolver() = default;
FomSolver::FomSolver(FomSolver&&) noexcept = default;

FomSolver::FomSolver(std::shared_ptr<const Assembler> assembler, FomConfig cfg, FlowProblem problem)
    : assembler_(std::move(assembler)), cfg_(cfg), problem_(std::move(problem)) {
  cfg_.validate();
  ops_ = assembler_->bilinear_forms();
  viscous_ = cfg_.nu * ops_.stiffness + cfg_.mu * ops_.grad_div;
  const TaylorHoodSpace& sp = assembler_->space();
  const int n = sp.n_velocity_scalar();
  boundary_.assign(static_cast<std::size_t>(2 * n), 0);
  for (int d : sp.velocity().boundary_dofs()) {
    boundary_[static_cast<std::size_t>(d)] = 1;
    boundary_[static_cast<std::size_t>(n + d)] = 1;
  }
}

int FomSolver::n_total() const {
  return assembler_->space().n_velocity() + assembler_->space().n_pressure() + 1;
}

ColMatrix FomSolver::saddle_matrix(const SparseMatrix& vblock) const {
  const int nv = assembler_->space().n_velocity();
  const int np = assembler_->space().n_pressure();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(vblock.nonZeros() + 2 * ops_.divergence.nonZeros() + 2 * np + nv));
  for (int i = 0; i < vblock.outerSize(); ++i) {
    if (boundary_[static_cast<std::size_t>(i)]) {
      t.emplace_back(i, i, 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(vblock, i); it; ++it)
      t.emplace_back(i, static_cast<int>(it.col()), it.value());
  }
  const SparseMatrix& b = ops_.divergence;
  for (int q = 0; q < b.outerSize(); ++q) {
    for (SparseMatrix::InnerIterator it(b, q); it; ++it) {
      const int j = static_cast<int>(it.col());
      t.emplace_back(nv + q, j, it.value());
      if (!boundary_[static_cast<std::size_t>(j)]) t.emplace_back(j, nv + q, -it.value());
    }
    t.emplace_back(nv + q, nv + np, ops_.pressure_mean[q]);
    t.emplace_back(nv + np, nv + q, ops_.pressure_mean[q]);
  }
  ColMatrix a(n_total(), n_total());
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

const FomSolver::SaddleSolver& FomSolver::mass_saddle_lu() const {
  if (!mass_lu_) {
    auto lu = std::make_unique<SaddleSolver>();
    lu->factorize(saddle_matrix(ops_.mass));
    mass_lu_ = std::move(lu);
  }
  return *mass_lu_;
}

Vector FomSolver::load(double t) const {
  if (!problem_.forcing) return Vector::Zero(assembler_->space().n_velocity());
  // Each step needs the load at t_new twice (step and time derivative).
  if (load_time_ != t || load_cache_.size() == 0) {
    load_cache_ = assembler_->load(problem_.forcing, t);
    load_time_ = t;
  }
  return load_cache_;
}

FomSolver::StepResult FomSolver::step(const Vector& u_prev, const Vector* u_pp, double t_new,
                                      const Vector* pressure_guess) const {
  const int nv = assembler_->space().n_velocity();
  const int np = assembler_->space().n_pressure();
  const double dt = cfg_.dt;

  // time term M (a0 u - history) / dt
  double a0 = 1.0;
  Vector history = u_prev;
  Vector guess = u_prev;
  if (u_pp) {
    a0 = 1.5;
    history = 2.0 * u_prev - 0.5 * (*u_pp);
    guess = 2.0 * u_prev - *u_pp;
  }
  const SparseMatrix linear = (a0 / dt) * ops_.mass + viscous_;
  const Vector rhs_fixed = load(t_new) + ops_.mass * history / dt;
  const double scale = std::max(1.0, rhs_fixed.norm());

  Vector x = Vector::Zero(n_total());
  x.head(nv) = guess;
  for (int i = 0; i < nv; ++i)
    if (boundary_[static_cast<std::size_t>(i)]) x[i] = 0.0;
  if (pressure_guess) x.segment(nv, np) = *pressure_guess;

  auto residual = [&](const Vector& s) {
    const Vector u = s.head(nv);
    const Vector p = s.segment(nv, np);
    Vector r(n_total());
    r.head(nv) = linear * u + assembler_->convection_apply(u, u) - ops_.divergence.transpose() * p - rhs_fixed;
    for (int i = 0; i < nv; ++i)
      if (boundary_[static_cast<std::size_t>(i)]) r[i] = u[i];
    r.segment(nv, np) = ops_.divergence * u + ops_.pressure_mean * s[nv + np];
    r[nv + np] = ops_.pressure_mean.dot(p);
    return r;
  };

  // Newton with a lagged Jacobian: the factorization is reused (also across
  // steps) while it still contracts the residual by half per iteration.
  StepResult out;
  if (!jacobian_lu_) jacobian_lu_ = std::make_unique<SaddleSolver>();
  std::unique_ptr<SaddleSolver> picard_lu;
  SaddleSolver* lu = jacobian_lu_.get();
  if (lu->ready && lu->key != a0) lu->ready = false;
  bool picard = false;
  Vector r = residual(x);
  double rn = r.norm();
  const double r_start = rn;
  int it = 0;
  for (; it < cfg_.newton_max_iter && !(rn <= cfg_.newton_tol * scale); ++it) {
    bool fresh = false;
    if (!lu->ready) {
      const Vector u = x.head(nv);
      const SparseMatrix jac = picard ? SparseMatrix(linear + assembler_->convection(u))
                                      : SparseMatrix(linear + assembler_->convection_jacobian(u));
      lu->factorize(saddle_matrix(jac));
      lu->key = a0;
      fresh = true;
    }
    const Vector dx = lu->solve(-r);
    Vector x_new = x + dx;
    Vector r_new = residual(x_new);
    const double rn_new = r_new.norm();
    if (!fresh && !(rn_new <= 0.5 * rn)) {
      lu->ready = false;
      continue;
    }
    if (!picard && (!std::isfinite(rn_new) || rn_new > 1e3 * std::max(r_start, scale * cfg_.newton_tol))) {
      // Newton diverging: restart this step with Picard linearization.
      picard = true;
      picard_lu = std::make_unique<SaddleSolver>();
      lu = picard_lu.get();
      continue;
    }
    x = std::move(x_new);
    r = std::move(r_new);
    rn = rn_new;
  }
  if (!(rn <= cfg_.newton_tol * scale)) {
    std::ostringstream os;
    os << "nonlinear solve did not converge at t=" << t_new << " after " << it << " iterations, residual " << rn;
    fail_numerical(os.str());
  }
  out.velocity = x.head(nv);
  out.pressure = x.segment(nv, np);
  out.iterations = it;
  out.residual = rn;
  out.used_picard = picard;
  return out;
}

Vector FomSolver::galerkin_time_derivative(const Vector& u, double t, Vector* pressure) const {
  const int nv = assembler_->space().n_velocity();
  const int np = assembler_->space().n_pressure();
  Vector rhs = Vector::Zero(n_total());
  rhs.head(nv) = load(t) - viscous_ * u - assembler_->convection_apply(u, u);
  for (int i = 0; i < nv; ++i)
    if (boundary_[static_cast<std::size_t>(i)]) rhs[i] = 0.0;
  const Vector x = mass_saddle_lu().solve(rhs);
  if (!x.allFinite()) fail_numerical("time-derivative solve produced non-finite values");
  if (pressure) *pressure = x.segment(nv, np);
  return x.head(nv);
}

Vector FomSolver::leray_project(const Vector& u) const {
  const int nv = assembler_->space().n_velocity();
  Vector rhs = Vector::Zero(n_total());
  rhs.head(nv) = ops_.mass * u;
  for (int i = 0; i < nv; ++i)
    if (boundary_[static_cast<std::size_t>(i)]) rhs[i] = 0.0;
  return mass_saddle_lu().solve(rhs).head(nv);
}

Vector FomSolver::initial_velocity() const {
  const TaylorHoodSpace& sp = assembler_->space();
  if (!problem_.initial_velocity) return Vector::Zero(sp.n_velocity());
  return leray_project(sp.zero_boundary(interpolate(sp, problem_.initial_velocity, 0.0)));
}

Trajectory FomSolver::run() const { return run(initial_velocity()); }

Trajectory FomSolver::run(const Vector& u0) const {
  const int m = cfg_.steps();
  Trajectory tr;
  tr.dt = cfg_.dt;
  tr.times.reserve(static_cast<std::size_t>(m + 1));
  Vector p0;
  tr.times.push_back(0.0);
  tr.velocities.push_back(u0);
  tr.derivatives.push_back(galerkin_time_derivative(u0, 0.0, &p0));
  tr.pressures.push_back(p0);
  for (int j = 1; j <= m; ++j) {
    const double t = j * cfg_.dt;
    const bool bdf2 = cfg_.integrator == Integrator::Bdf2 && j >= 2;
    StepResult s;
    try {
      s = step(tr.velocities[static_cast<std::size_t>(j - 1)],
               bdf2 ? &tr.velocities[static_cast<std::size_t>(j - 2)] : nullptr, t,
               &tr.pressures[static_cast<std::size_t>(j - 1)]);
    } catch (const Error& e) {
      throw Error(e.kind(), "FOM step " + std::to_string(j) + ": " + e.what());
    }
    tr.times.push_back(t);
    tr.velocities.push_back(std::move(s.velocity));
    tr.pressures.push_back(std::move(s.pressure));
    tr.derivatives.push_back(galerkin_time_derivative(tr.velocities.back(), t));
  }
  return tr;
}

FomSolver::StepResult fom_step(const FomSolver& solver, const Vector& u_prev, const Vector* u_prevprev, double t_new) {
  return solver.step(u_prev, u_prevprev, t_new);
}

Vector galerkin_time_derivative(const FomSolver& solver, const Vector& u, double t) {
  return solver.galerkin_time_derivative(u, t);
}

Trajectory run_fom(const FomSolver& solver) { return solver.run(); }

}  // namespace tdpod
