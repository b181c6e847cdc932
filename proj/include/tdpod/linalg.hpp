#pragma once

#include <Eigen/Dense>

namespace tdpod {

struct SymmetricEigen {
  Eigen::VectorXd values;   // non-increasing
  Eigen::MatrixXd vectors;  // column k belongs to values[k], unit Euclidean norm
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// `tol` times the Frobenius norm of the input.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-13, int max_sweeps = 100);

/// Largest eigenvalue of a symmetric positive semi-definite matrix by power
/// iteration, relative tolerance `tol`.
double power_iteration(const Eigen::MatrixXd& a, double tol = 1e-10, int max_iter = 100000);

}  // namespace tdpod
