#pragma once

#include <Eigen/Sparse>
#include <filesystem>
#include <memory>
#include <vector>

#include "tdpod/fe_space.hpp"

namespace tdpod {

/// Compressed sparse row storage.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Exact velocity sample for error norms: value and gradient grad[c][d] = d u_c / d x_d.
struct VelocitySample {
  double u[2];
  double grad[2][2];
};
using ExactVelocity = std::function<VelocitySample(const Point&, double)>;

/// Bilinear forms on the Taylor-Hood pair. Velocity operators act on
/// component-blocked vectors of length 2n.
struct FeOperators {
  SparseMatrix mass_scalar;       // (psi_b, psi_a)
  SparseMatrix stiffness_scalar;  // (grad psi_b, grad psi_a)
  SparseMatrix mass;              // M
  SparseMatrix stiffness;         // A
  SparseMatrix grad_div;          // G
  SparseMatrix divergence;        // B, rows = pressure DOFs: (q, div phi_j)
  Vector pressure_mean;           // integral of each pressure basis function
};

/// Reference-element tables for one quadrature rule.
struct ReferenceTables {
  TriangleRule rule;
  int n_local = 0;
  std::vector<double> value;  // [q * n_local + a]
  std::vector<double> dxi;
  std::vector<double> deta;
  ReferenceTables(const LagrangeElement& element, const TriangleRule& rule);
};

/// Cell-loop assembler for the velocity/pressure forms and the
/// skew-symmetrized convective trilinear form
///   b(u, v, w) = ((u . grad) v, w) + 1/2 ((div u) v, w).
class Assembler {
 public:
  explicit Assembler(std::shared_ptr<const TaylorHoodSpace> space);

  const TaylorHoodSpace& space() const { return *space_; }
  std::shared_ptr<const TaylorHoodSpace> space_ptr() const { return space_; }
  int quadrature_degree() const { return velocity_tables_.rule.degree; }

  FeOperators bilinear_forms() const;

  double trilinear(const Vector& u, const Vector& v, const Vector& w) const;
  /// N(u)_{ij} = b(u, phi_j, phi_i).
  SparseMatrix convection(const Vector& u) const;
  /// K(u)_{ij} = b(phi_j, u, phi_i); N(u) + K(u) is the Jacobian of b(u, u, .).
  SparseMatrix convection_derivative(const Vector& u) const;
  /// N(u) + K(u) in one pass.
  SparseMatrix convection_jacobian(const Vector& u) const;
  /// Vector b(u, v, phi_i) for all i.
  Vector convection_apply(const Vector& u, const Vector& v) const;

  Vector load(const VectorField& f, double t) const;

  /// Errors of a FE velocity against an exact field, by a high-order rule.
  double l2_error(const Vector& u, const ExactVelocity& exact, double t) const;
  double h1_seminorm_error(const Vector& u, const ExactVelocity& exact, double t) const;

  /// max over quadrature points of the Frobenius norm of grad u.
  double max_gradient(const Vector& u) const;
  /// ||grad u||_{L^4}, the L^{2d/(d-1)} norm for d = 2.
  double gradient_l4(const Vector& u) const;
  /// max over velocity nodes of the Euclidean norm of u.
  double max_nodal(const Vector& u) const;

 private:
  template <class Fn>
  void for_each_quad_point(const ReferenceTables& tab, Fn&& fn) const;

  std::shared_ptr<const TaylorHoodSpace> space_;
  std::vector<CellGeometry> geometry_;
  ReferenceTables velocity_tables_;
  ReferenceTables pressure_tables_;  // pressure basis on the velocity rule
  ReferenceTables error_tables_;     // velocity basis on a high-order rule
};

// Free-function entry points.
FeOperators assemble_bilinear_forms(const Assembler& assembler);
double trilinear_form(const Assembler& assembler, const Vector& u, const Vector& v, const Vector& w);
SparseMatrix assemble_convection(const Assembler& assembler, const Vector& u);
Vector assemble_load(const Assembler& assembler, const VectorField& f, double t);

/// Coordinate-format export: header "row,col,value".
void write_sparse_coo_csv(const SparseMatrix& m, const std::filesystem::path& path);

double max_asymmetry(const SparseMatrix& m);

}  // namespace tdpod
