#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "tdpod/mesh.hpp"
#include "tdpod/quadrature.hpp"

namespace tdpod {

using Vector = Eigen::VectorXd;
using ScalarField = std::function<double(const Point&, double)>;
using VectorField = std::function<std::array<double, 2>(const Point&, double)>;

/// Lagrange shape functions of degree l on the reference triangle.
/// Local order: the three vertices, then l-1 nodes on each edge (v0->v1,
/// v1->v2, v2->v0, in direction of travel), then interior nodes.
class LagrangeElement {
 public:
  explicit LagrangeElement(int degree);

  int degree() const { return degree_; }
  int n_local() const { return static_cast<int>(index_.size()); }
  Point node(int a) const;
  void values(double xi, double eta, double* out) const;
  /// Reference gradients (d/dxi, d/deta).
  void gradients(double xi, double eta, double* dxi, double* deta) const;

 private:
  int degree_;
  std::vector<std::array<int, 3>> index_;  // barycentric exponents, sum = degree
};

/// Affine map of one triangle: x = v0 + J (xi, eta).
struct CellGeometry {
  Point origin;
  double jac[2][2];
  double inv_t[2][2];  // J^{-T}
  double det;          // positive for counter-clockwise cells

  Point map(double xi, double eta) const {
    return {origin.x + jac[0][0] * xi + jac[0][1] * eta, origin.y + jac[1][0] * xi + jac[1][1] * eta};
  }
};

CellGeometry cell_geometry(const Mesh& mesh, std::size_t cell);

/// Continuous scalar Lagrange space of degree l with Dirichlet bookkeeping.
class ScalarSpace {
 public:
  ScalarSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return element_.degree(); }
  const LagrangeElement& element() const { return element_; }
  int n_dofs() const { return static_cast<int>(coords_.size()); }
  int n_local() const { return element_.n_local(); }
  const std::vector<Point>& dof_coordinates() const { return coords_; }
  const int* cell_dofs(std::size_t cell) const { return &cell_dofs_[cell * static_cast<std::size_t>(n_local())]; }
  const std::vector<int>& boundary_dofs() const { return boundary_; }
  bool is_boundary(int dof) const { return on_boundary_[static_cast<std::size_t>(dof)] != 0; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  LagrangeElement element_;
  std::vector<Point> coords_;
  std::vector<int> cell_dofs_;
  std::vector<int> boundary_;
  std::vector<char> on_boundary_;
};

/// Taylor-Hood pair: continuous velocity of degree l (two components,
/// component-blocked DOF vector) and continuous pressure of degree l-1
/// carrying the zero-mean constraint.
class TaylorHoodSpace {
 public:
  TaylorHoodSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return velocity_.mesh(); }
  int degree() const { return velocity_.degree(); }
  const ScalarSpace& velocity() const { return velocity_; }
  const ScalarSpace& pressure() const { return pressure_; }
  int n_velocity_scalar() const { return velocity_.n_dofs(); }
  int n_velocity() const { return 2 * velocity_.n_dofs(); }
  int n_pressure() const { return pressure_.n_dofs(); }
  static constexpr bool pressure_zero_mean = true;

  /// Velocity vector with boundary components set to zero.
  Vector zero_boundary(Vector v) const;

 private:
  ScalarSpace velocity_;
  ScalarSpace pressure_;
};

std::shared_ptr<const TaylorHoodSpace> build_taylor_hood(std::shared_ptr<const Mesh> mesh, int degree);

/// Nodal interpolation (DOF value = field value at the DOF coordinate).
Vector interpolate(const ScalarSpace& space, const ScalarField& f, double t = 0.0);
/// Component-blocked nodal interpolation of a vector field.
Vector interpolate(const TaylorHoodSpace& space, const VectorField& f, double t = 0.0);

}  // namespace tdpod
