#include "tdpod/fe_space.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "tdpod/error.hpp"

namespace tdpod {

namespace {

// P_m(lambda) = prod_{a<m} (l*lambda - a)/(a+1) and its derivative.
void lagrange_factor(int l, int m, double lambda, double& value, double& deriv) {
  value = 1.0;
  deriv = 0.0;
  for (int a = 0; a < m; ++a) {
    const double f = (l * lambda - a) / (a + 1.0);
    const double df = l / (a + 1.0);
    deriv = deriv * f + value * df;
    value *= f;
  }
}

}  // namespace

LagrangeElement::LagrangeElement(int degree) : degree_(degree) {
  if (degree < 1) fail_input("LagrangeElement: degree must be >= 1");
  const int l = degree;
  index_.push_back({l, 0, 0});
  index_.push_back({0, l, 0});
  index_.push_back({0, 0, l});
  for (int k = 1; k < l; ++k) index_.push_back({l - k, k, 0});  // v0 -> v1
  for (int k = 1; k < l; ++k) index_.push_back({0, l - k, k});  // v1 -> v2
  for (int k = 1; k < l; ++k) index_.push_back({k, 0, l - k});  // v2 -> v0
  for (int j = 1; j < l; ++j)
    for (int i = 1; i + j < l; ++i) index_.push_back({l - i - j, i, j});
}

Point LagrangeElement::node(int a) const {
  const auto& idx = index_[static_cast<std::size_t>(a)];
  return {static_cast<double>(idx[1]) / degree_, static_cast<double>(idx[2]) / degree_};
}

void LagrangeElement::values(double xi, double eta, double* out) const {
  const double lam[3] = {1.0 - xi - eta, xi, eta};
  for (std::size_t a = 0; a < index_.size(); ++a) {
    double v = 1.0;
    for (int c = 0; c < 3; ++c) {
      double f, df;
      lagrange_factor(degree_, index_[a][c], lam[c], f, df);
      v *= f;
    }
    out[a] = v;
  }
}

void LagrangeElement::gradients(double xi, double eta, double* dxi, double* deta) const {
  const double lam[3] = {1.0 - xi - eta, xi, eta};
  for (std::size_t a = 0; a < index_.size(); ++a) {
    double f[3], df[3];
    for (int c = 0; c < 3; ++c) lagrange_factor(degree_, index_[a][c], lam[c], f[c], df[c]);
    // d lambda0 / d xi = -1, d lambda1 / d xi = 1, d lambda2 / d eta = 1
    const double d0 = df[0] * f[1] * f[2];
    dxi[a] = -d0 + f[0] * df[1] * f[2];
    deta[a] = -d0 + f[0] * f[1] * df[2];
  }
}

CellGeometry cell_geometry(const Mesh& mesh, std::size_t cell) {
  const auto& t = mesh.triangles[cell];
  const Point& a = mesh.vertices[static_cast<std::size_t>(t[0])];
  const Point& b = mesh.vertices[static_cast<std::size_t>(t[1])];
  const Point& c = mesh.vertices[static_cast<std::size_t>(t[2])];
  CellGeometry g{};
  g.origin = a;
  g.jac[0][0] = b.x - a.x;
  g.jac[0][1] = c.x - a.x;
  g.jac[1][0] = b.y - a.y;
  g.jac[1][1] = c.y - a.y;
  g.det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
  // inverse transpose
  g.inv_t[0][0] = g.jac[1][1] / g.det;
  g.inv_t[0][1] = -g.jac[1][0] / g.det;
  g.inv_t[1][0] = -g.jac[0][1] / g.det;
  g.inv_t[1][1] = g.jac[0][0] / g.det;
  return g;
}

ScalarSpace::ScalarSpace(std::shared_ptr<const Mesh> mesh, int degree) : mesh_(std::move(mesh)), element_(degree) {
  if (!mesh_) fail_input("ScalarSpace: null mesh");
  const Mesh& m = *mesh_;
  const int l = degree;
  const int nloc = element_.n_local();
  const std::size_t ncell = m.n_triangles();

  coords_ = m.vertices;

  std::map<std::pair<int, int>, int> edge_first_dof;
  auto edge_dofs_begin = [&](int a, int b) {
    const auto key = a < b ? std::pair{a, b} : std::pair{b, a};
    auto it = edge_first_dof.find(key);
    if (it != edge_first_dof.end()) return it->second;
    const int first = static_cast<int>(coords_.size());
    const Point& pa = m.vertices[static_cast<std::size_t>(key.first)];
    const Point& pb = m.vertices[static_cast<std::size_t>(key.second)];
    for (int k = 1; k < l; ++k) {
      const double s = static_cast<double>(k) / l;
      coords_.push_back({pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y)});
    }
    edge_first_dof.emplace(key, first);
    return first;
  };

  cell_dofs_.assign(ncell * static_cast<std::size_t>(nloc), -1);
  for (std::size_t c = 0; c < ncell; ++c) {
    const auto& t = m.triangles[c];
    int* dofs = &cell_dofs_[c * static_cast<std::size_t>(nloc)];
    dofs[0] = t[0];
    dofs[1] = t[1];
    dofs[2] = t[2];
    int pos = 3;
    for (int e = 0; e < 3; ++e) {
      const int va = t[static_cast<std::size_t>(e)];
      const int vb = t[static_cast<std::size_t>((e + 1) % 3)];
      const int first = edge_dofs_begin(va, vb);
      for (int k = 1; k < l; ++k) dofs[pos++] = va < vb ? first + (k - 1) : first + (l - 1 - k);
    }
    if (pos < nloc) {
      const CellGeometry g = cell_geometry(m, c);
      for (; pos < nloc; ++pos) {
        const Point ref = element_.node(pos);
        dofs[pos] = static_cast<int>(coords_.size());
        coords_.push_back(g.map(ref.x, ref.y));
      }
    }
  }

  on_boundary_.assign(coords_.size(), 0);
  for (const auto& e : m.boundary_edges) {
    const int a = e.vertices[0], b = e.vertices[1];
    on_boundary_[static_cast<std::size_t>(a)] = 1;
    on_boundary_[static_cast<std::size_t>(b)] = 1;
    if (l > 1) {
      const int first = edge_dofs_begin(a, b);
      for (int k = 0; k < l - 1; ++k) on_boundary_[static_cast<std::size_t>(first + k)] = 1;
    }
  }
  for (std::size_t i = 0; i < on_boundary_.size(); ++i)
    if (on_boundary_[i]) boundary_.push_back(static_cast<int>(i));
}

TaylorHoodSpace::TaylorHoodSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : velocity_(mesh, degree), pressure_(mesh, degree - 1) {}

Vector TaylorHoodSpace::zero_boundary(Vector v) const {
  const int n = n_velocity_scalar();
  for (int d : velocity_.boundary_dofs()) {
    v[d] = 0.0;
    v[n + d] = 0.0;
  }
  return v;
}

std::shared_ptr<const TaylorHoodSpace> build_taylor_hood(std::shared_ptr<const Mesh> mesh, int degree) {
  if (degree < 2) fail_input("build_taylor_hood: velocity degree must be >= 2 for an inf-sup stable pair");
  if (degree > 3) fail_input("build_taylor_hood: supported velocity degrees are 2 and 3");
  return std::make_shared<const TaylorHoodSpace>(std::move(mesh), degree);
}

Vector interpolate(const ScalarSpace& space, const ScalarField& f, double t) {
  Vector v(space.n_dofs());
  const auto& pts = space.dof_coordinates();
  for (int i = 0; i < space.n_dofs(); ++i) v[i] = f(pts[static_cast<std::size_t>(i)], t);
  return v;
}

Vector interpolate(const TaylorHoodSpace& space, const VectorField& f, double t) {
  const int n = space.n_velocity_scalar();
  Vector v(2 * n);
  const auto& pts = space.velocity().dof_coordinates();
  for (int i = 0; i < n; ++i) {
    const auto val = f(pts[static_cast<std::size_t>(i)], t);
    v[i] = val[0];
    v[n + i] = val[1];
  }
  return v;
}

}  // namespace tdpod
