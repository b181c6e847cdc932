#pragma once

#include <string>
#include <vector>

#include "tdpod/pod.hpp"

namespace tdpod {

/// Per-time errors of `approx` against `reference`, relative to ||reference^j||.
/// Where ||reference^j|| vanishes the absolute error is stored and flagged.
struct ErrorSeries {
  std::vector<double> l2;
  std::vector<double> h1;
  std::vector<double> abs_l2;
  std::vector<double> abs_h1;
  std::vector<char> absolute_l2;
  std::vector<char> absolute_h1;
  double accumulated_l2 = 0.0;  // sum_{j>=1} dt ||e^j||_0^2
  double accumulated_h1 = 0.0;  // sum_{j>=1} dt ||grad e^j||_0^2
  double max_l2() const;
  double max_h1() const;
};

ErrorSeries compute_error_norms(const std::vector<Vector>& approx, const std::vector<Vector>& reference,
                                const FeOperators& ops, double dt);

enum class BoundAnchor { Initial, Mean };
std::string to_string(BoundAnchor a);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  double anchor_term = 0.0;      // ||z^0||^2 or ||mean z||^2
  double derivative_sum = 0.0;   // sum_n ||z_t^n||^2
  double second_integral = 0.0;  // approx int ||z_tt||^2
};

/// max_k ||z^k||^2 <= 3||z^0||^2 + (3T^2/M) sum_n ||z_t^n||^2 + (4T/3) dt^2 int ||z_tt||^2
/// and its mean-anchored form 3||mean z||^2 + (12T^2/M) sum + (16T/3) dt^2 int.
/// z has M+1 values, z_t has M values (n = 1..M). Passes when margin >= -tol * rhs.
BoundCheck pointwise_bound_check(const std::vector<Vector>& z, const std::vector<Vector>& z_t,
                                 const SparseMatrix& x, double dt, BoundAnchor anchor, double tol = 1e-8);

/// Riemann sum of ||(u^{j+1} - 2u^j + u^{j-1}) / dt^2||_X^2 over [0, T]: cells of
/// width dt around t_1..t_{M-1}, the two outer cells widened by dt/2 to reach the ends.
double second_difference_integral(const std::vector<Vector>& series, const SparseMatrix& x, double dt);

struct SecondDerivativeIntegrals {
  double l2 = 0.0;
  double h1 = 0.0;
};
SecondDerivativeIntegrals second_derivative_integrals(const Trajectory& traj, const FeOperators& ops);

struct Rate {
  double value = 0.0;
  bool saturated = false;  // a zero error made the logarithm undefined
};
/// rate_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
std::vector<Rate> convergence_rates(const std::vector<double>& errors, const std::vector<double>& spacings);

/// Discrete surrogates of the sup-norm constants of the ROM error analysis.
/// Velocity sup-norms are maxima over nodal values, gradient sup-norms maxima
/// over quadrature points.
struct ConstantsReport {
  double c_inf = 0.0;    // max_j ||P u^j||_inf
  double c_1inf = 0.0;   // max_j ||grad P u^j||_inf
  double c_ld = 0.0;     // max_j ||grad P u^j||_{L^4}
  double k_inf = 0.0;    // dt sum_{j=0}^M ||P u^j||_inf^2
  double k_1inf = 0.0;   // dt sum_{j=0}^M ||grad P u^j||_inf
  double c_u = 0.0;      // 2 K_1inf + K_inf^2 / (2 mu) + 2
  double time_condition = 0.0;  // dt (2 C_1inf + C_inf^2 / (2 mu) + 2/T), required <= 1/2
  bool time_condition_ok = false;
};

ConstantsReport constants_report(const Assembler& assembler, const Trajectory& traj, const PodBasis& basis,
                                 const InnerProduct& x, double mu);

/// Both sides of the snapshot projection bound
///   max_n ||P u^n - u^n||_X^2 <= C_X^2 and (1/M) sum_{j>=1} ||u^j - P u^j||_X^2 <= C_X^2,
///   C_X^2 = (3 + 6T^2/tau^2) sum_{k>r} lambda_k + (16T/3) dt^2 int ||u_tt||_X^2,
/// for a basis built from initial value plus Galerkin derivatives.
struct TailBound {
  double max_error = 0.0;
  double mean_error = 0.0;
  double bound = 0.0;
  bool pass_max = false;
  bool pass_mean = false;
};
TailBound tail_consistency_check(const Trajectory& traj, const PodBasis& basis, const InnerProduct& x, int r,
                                 double tol = 1e-8);

/// One row of report.csv.
struct CheckRecord {
  std::string check_id;
  long long time_index = -1;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

void write_report_csv(const std::vector<CheckRecord>& rows, const std::filesystem::path& path);

struct RateRow {
  int level = 0;
  double spacing = 0.0;
  double error_l2 = 0.0;
  double error_h1 = 0.0;
};
void write_rates_csv(const std::vector<RateRow>& rows, const std::filesystem::path& path);

/// P_r u^j - u^j for every velocity and P_r u_t^n - u_t^n for n = 1..M.
struct ProjectionResiduals {
  std::vector<Vector> z;
  std::vector<Vector> z_t;
};
ProjectionResiduals projection_residuals(const Trajectory& traj, const PodBasis& basis, const InnerProduct& x,
                                         int r);

}  // namespace tdpod
