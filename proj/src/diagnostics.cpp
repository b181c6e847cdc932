#include "tdpod/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "tdpod/error.hpp"
#include "tdpod/io.hpp"

namespace tdpod {

double ErrorSeries::max_l2() const { return l2.empty() ? 0.0 : *std::max_element(l2.begin(), l2.end()); }
double ErrorSeries::max_h1() const { return h1.empty() ? 0.0 : *std::max_element(h1.begin(), h1.end()); }

ErrorSeries compute_error_norms(const std::vector<Vector>& approx, const std::vector<Vector>& reference,
                                const FeOperators& ops, double dt) {
  if (approx.size() != reference.size()) fail_input("compute_error_norms: series lengths differ");
  ErrorSeries out;
  for (std::size_t j = 0; j < approx.size(); ++j) {
    if (approx[j].size() != reference[j].size()) fail_input("compute_error_norms: vector sizes differ");
    const Vector e = approx[j] - reference[j];
    const double el2 = std::sqrt(std::max(0.0, e.dot(ops.mass * e)));
    const double eh1 = std::sqrt(std::max(0.0, e.dot(ops.stiffness * e)));
    const double rl2 = std::sqrt(std::max(0.0, reference[j].dot(ops.mass * reference[j])));
    const double rh1 = std::sqrt(std::max(0.0, reference[j].dot(ops.stiffness * reference[j])));
    out.abs_l2.push_back(el2);
    out.abs_h1.push_back(eh1);
    out.absolute_l2.push_back(rl2 == 0.0);
    out.absolute_h1.push_back(rh1 == 0.0);
    out.l2.push_back(rl2 == 0.0 ? el2 : el2 / rl2);
    out.h1.push_back(rh1 == 0.0 ? eh1 : eh1 / rh1);
    if (j >= 1) {
      out.accumulated_l2 += dt * el2 * el2;
      out.accumulated_h1 += dt * eh1 * eh1;
    }
  }
  return out;
}

std::string to_string(BoundAnchor a) { return a == BoundAnchor::Initial ? "initial" : "mean"; }

double second_difference_integral(const std::vector<Vector>& series, const SparseMatrix& x, double dt) {
  if (series.size() < 3) fail_input("second difference integral needs at least three time levels");
  const double inv = 1.0 / (dt * dt);
  const std::size_t last = series.size() - 2;
  double sum = 0.0;
  for (std::size_t j = 1; j <= last; ++j) {
    const Vector d = (series[j + 1] - 2.0 * series[j] + series[j - 1]) * inv;
    // Cell of width dt around t_j; the first and last cells also absorb the
    // half steps at the ends so the sum covers all of [0, T].
    const double w = 1.0 + (j == 1 ? 0.5 : 0.0) + (j == last ? 0.5 : 0.0);
    sum += w * dt * d.dot(x * d);
  }
  return sum;
}

BoundCheck pointwise_bound_check(const std::vector<Vector>& z, const std::vector<Vector>& z_t, const SparseMatrix& x,
                                 double dt, BoundAnchor anchor, double tol) {
  const int m = static_cast<int>(z.size()) - 1;
  if (m < 2) fail_input("pointwise bound check needs M >= 2");
  if (static_cast<int>(z_t.size()) != m) fail_input("pointwise bound check: expected M derivative values");
  const double t_final = m * dt;

  BoundCheck c;
  for (const auto& v : z) c.lhs = std::max(c.lhs, v.dot(x * v));
  for (const auto& v : z_t) c.derivative_sum += v.dot(x * v);
  c.second_integral = second_difference_integral(z, x, dt);
  double a_coef = 0.0, b_coef = 0.0, c_coef = 0.0;
  if (anchor == BoundAnchor::Initial) {
    c.anchor_term = z.front().dot(x * z.front());
    a_coef = 3.0;
    b_coef = 3.0 * t_final * t_final / m;
    c_coef = 4.0 * t_final / 3.0;
  } else {
    const Vector mean = temporal_mean(z);
    c.anchor_term = mean.dot(x * mean);
    a_coef = 3.0;
    b_coef = 12.0 * t_final * t_final / m;
    c_coef = 16.0 * t_final / 3.0;
  }
  c.rhs = a_coef * c.anchor_term + b_coef * c.derivative_sum + c_coef * dt * dt * c.second_integral;
  c.margin = c.rhs - c.lhs;
  c.pass = c.margin >= -tol * c.rhs;
  return c;
}

SecondDerivativeIntegrals second_derivative_integrals(const Trajectory& traj, const FeOperators& ops) {
  if (traj.steps() < 2) fail_input("second derivative integrals need M >= 2");
  return {second_difference_integral(traj.velocities, ops.mass, traj.dt),
          second_difference_integral(traj.velocities, ops.stiffness, traj.dt)};
}

std::vector<Rate> convergence_rates(const std::vector<double>& errors, const std::vector<double>& spacings) {
  if (errors.size() != spacings.size() || errors.size() < 2)
    fail_input("convergence_rates needs at least two matching samples");
  std::vector<Rate> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(spacings[i] > 0.0) || !(spacings[i + 1] > 0.0) || spacings[i] == spacings[i + 1])
      fail_input("convergence_rates: spacings must be positive and distinct");
    if (errors[i] < 0.0 || errors[i + 1] < 0.0) fail_input("convergence_rates: negative error");
    Rate r;
    if (errors[i] == 0.0 || errors[i + 1] == 0.0) {
      r.saturated = true;
    } else {
      r.value = std::log(errors[i] / errors[i + 1]) / std::log(spacings[i] / spacings[i + 1]);
    }
    out.push_back(r);
  }
  return out;
}

ConstantsReport constants_report(const Assembler& assembler, const Trajectory& traj, const PodBasis& basis,
                                 const InnerProduct& x, double mu) {
  ConstantsReport c;
  for (const auto& u : traj.velocities) {
    const Vector pu = project_onto_basis(basis, x, u).lifted;
    const double vinf = assembler.max_nodal(pu);
    const double ginf = assembler.max_gradient(pu);
    c.c_inf = std::max(c.c_inf, vinf);
    c.c_1inf = std::max(c.c_1inf, ginf);
    c.c_ld = std::max(c.c_ld, assembler.gradient_l4(pu));
    c.k_inf += traj.dt * vinf * vinf;
    c.k_1inf += traj.dt * ginf;
  }
  // K_inf enters squared exactly as written in the stability constant.
  c.c_u = 2.0 * c.k_1inf + c.k_inf * c.k_inf / (2.0 * mu) + 2.0;
  const double t_final = traj.final_time();
  c.time_condition = t_final > 0.0 ? traj.dt * (2.0 * c.c_1inf + c.c_inf * c.c_inf / (2.0 * mu) + 2.0 / t_final) : 0.0;
  c.time_condition_ok = c.time_condition <= 0.5;
  return c;
}

ProjectionResiduals projection_residuals(const Trajectory& traj, const PodBasis& basis, const InnerProduct& x,
                                         int r) {
  ProjectionResiduals out;
  for (const auto& u : traj.velocities) out.z.push_back(project_onto_basis(basis, x, u, r).lifted - u);
  for (std::size_t n = 1; n < traj.derivatives.size(); ++n)
    out.z_t.push_back(project_onto_basis(basis, x, traj.derivatives[n], r).lifted - traj.derivatives[n]);
  return out;
}

TailBound tail_consistency_check(const Trajectory& traj, const PodBasis& basis, const InnerProduct& x, int r,
                                 double tol) {
  const int m = traj.steps();
  if (m < 2) fail_input("tail consistency check needs M >= 2");
  TailBound out;
  double sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    const Vector& u = traj.velocities[static_cast<std::size_t>(j)];
    const Vector e = project_onto_basis(basis, x, u, r).lifted - u;
    const double e2 = x.norm2(e);
    out.max_error = std::max(out.max_error, e2);
    if (j >= 1) sum += e2;
  }
  out.mean_error = sum / m;
  const double t_final = traj.final_time();
  const double ratio = t_final / basis.tau;
  out.bound = (3.0 + 6.0 * ratio * ratio) * basis.tail(r) +
              16.0 * t_final / 3.0 * traj.dt * traj.dt * second_difference_integral(traj.velocities, *x.op, traj.dt);
  out.pass_max = out.max_error <= out.bound * (1.0 + tol);
  out.pass_mean = out.mean_error <= out.bound * (1.0 + tol);
  return out;
}

void write_report_csv(const std::vector<CheckRecord>& rows, const std::filesystem::path& path) {
  CsvWriter w(path, {"check_id", "time_index", "lhs", "rhs", "margin", "pass"});
  for (const auto& r : rows) {
    w.cell(r.check_id);
    w.cell(r.time_index);
    w.cell(r.lhs);
    w.cell(r.rhs);
    w.cell(r.margin);
    w.cell(r.pass);
    w.end_row();
  }
}

void write_rates_csv(const std::vector<RateRow>& rows, const std::filesystem::path& path) {
  std::vector<double> sp, el2, eh1;
  for (const auto& r : rows) {
    sp.push_back(r.spacing);
    el2.push_back(r.error_l2);
    eh1.push_back(r.error_h1);
  }
  const auto rl2 = rows.size() >= 2 ? convergence_rates(el2, sp) : std::vector<Rate>{};
  const auto rh1 = rows.size() >= 2 ? convergence_rates(eh1, sp) : std::vector<Rate>{};
  CsvWriter w(path, {"level", "h_or_dt", "error_L2", "error_H1", "rate_L2", "rate_H1"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w.cell(rows[i].level);
    w.cell(rows[i].spacing);
    w.cell(rows[i].error_l2);
    w.cell(rows[i].error_h1);
    // Rates belong to the finer level of each pair; the first row has none.
    auto rate_cell = [&](const std::vector<Rate>& rs) {
      if (i == 0) w.cell(std::string());
      else if (rs[i - 1].saturated) w.cell(std::string("saturated"));
      else w.cell(rs[i - 1].value);
    };
    rate_cell(rl2);
    rate_cell(rh1);
    w.end_row();
  }
}

}  // namespace tdpod
