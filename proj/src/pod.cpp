#include "tdpod/pod.hpp"

#include <algorithm>
#include <cmath>

#include "tdpod/error.hpp"
#include "tdpod/linalg.hpp"

namespace tdpod {

InnerProductTag parse_inner_product(const std::string& s) {
  if (s == "L2" || s == "l2") return InnerProductTag::L2;
  if (s == "H1" || s == "h1") return InnerProductTag::H1;
  fail_input("unknown inner product '" + s + "' (expected L2 or H1)");
}

std::string to_string(InnerProductTag x) { return x == InnerProductTag::L2 ? "L2" : "H1"; }

InnerProduct make_inner_product(InnerProductTag tag, const FeOperators& ops) {
  return {tag, tag == InnerProductTag::L2 ? &ops.mass : &ops.stiffness};
}

double default_threshold(InnerProductTag tag) { return tag == InnerProductTag::L2 ? 1e-3 : 1e-2; }

double PodBasis::tail(int from) const {
  double s = 0.0;
  for (Eigen::Index k = std::max(from, 0); k < eigenvalues.size(); ++k) s += std::max(eigenvalues[k], 0.0);
  return s;
}

double PodBasis::trace() const { return tail(0); }

Eigen::VectorXd PodBasis::relative_singular_values() const {
  Eigen::VectorXd s(d_v);
  double total = 0.0;
  for (int k = 0; k < d_v; ++k) total += eigenvalues[k];
  for (int k = 0; k < d_v; ++k) s[k] = std::sqrt(eigenvalues[k] / total);
  return s;
}

Eigen::MatrixXd correlation_matrix(const SnapshotSet& set, const InnerProduct& x) {
  const int n = set.size();
  if (n == 0) fail_input("correlation_matrix: empty snapshot set");
  std::vector<Vector> applied;
  applied.reserve(static_cast<std::size_t>(n));
  for (const auto& y : set.members) {
    if (y.size() != x.op->rows()) fail_input("correlation_matrix: member size does not match the inner product");
    applied.push_back(*x.op * y);
  }
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = set.members[static_cast<std::size_t>(i)].dot(applied[static_cast<std::size_t>(j)]) / n;
      k(i, j) = v;
      k(j, i) = v;
    }
  return k;
}

namespace {

void gram_matrices(PodBasis& b, const FeOperators& ops) {
  const int r = static_cast<int>(b.modes.size());
  b.mass.resize(r, r);
  b.stiffness.resize(r, r);
  for (int j = 0; j < r; ++j) {
    const Vector mj = ops.mass * b.modes[static_cast<std::size_t>(j)];
    const Vector aj = ops.stiffness * b.modes[static_cast<std::size_t>(j)];
    for (int i = 0; i < r; ++i) {
      b.mass(i, j) = b.modes[static_cast<std::size_t>(i)].dot(mj);
      b.stiffness(i, j) = b.modes[static_cast<std::size_t>(i)].dot(aj);
    }
  }
  b.mass = 0.5 * (b.mass + b.mass.transpose()).eval();
  b.stiffness = 0.5 * (b.stiffness + b.stiffness.transpose()).eval();
}

}  // namespace

PodBasis compute_pod_basis(const SnapshotSet& set, const InnerProduct& x, const FeOperators& ops,
                           const RankRule& rule) {
  const Eigen::MatrixXd k = correlation_matrix(set, x);
  const SymmetricEigen eig = jacobi_eigen(k);
  const int n = set.size();
  const double lambda1 = eig.values[0];
  if (!(lambda1 > 0.0)) fail_input("compute_pod_basis: snapshot set is identically zero");

  PodBasis b;
  b.tag = x.tag;
  b.n_snapshots = n;
  b.tau = set.tau;
  b.variant = to_string(set.variant);
  b.eigenvalues = eig.values;
  b.d_v = 0;
  while (b.d_v < n && eig.values[b.d_v] > rule.rank_tolerance * lambda1) ++b.d_v;

  if (rule.r > 0) {
    if (rule.r > b.d_v)
      fail_input("compute_pod_basis: requested rank " + std::to_string(rule.r) + " exceeds snapshot rank " +
                 std::to_string(b.d_v));
    b.r = rule.r;
  } else if (rule.threshold > 0.0) {
    const Eigen::VectorXd rel = b.relative_singular_values();
    b.r = 0;
    while (b.r < b.d_v && rel[b.r] >= rule.threshold) ++b.r;
    b.r = std::max(b.r, 1);
  } else {
    b.r = b.d_v;
  }

  // phi_k = (N lambda_k)^{-1/2} sum_j v_k^j y_j
  b.modes.reserve(static_cast<std::size_t>(b.r));
  for (int m = 0; m < b.r; ++m) {
    Vector phi = Vector::Zero(set.members.front().size());
    for (int j = 0; j < n; ++j) phi += eig.vectors(j, m) * set.members[static_cast<std::size_t>(j)];
    phi /= std::sqrt(n * eig.values[m]);
    b.modes.push_back(std::move(phi));
  }
  // Two passes of modified Gram-Schmidt in X restore orthonormality lost to
  // round-off in weakly separated small eigenvalues; spans stay nested.
  for (int pass = 0; pass < 2; ++pass) {
    for (int m = 0; m < b.r; ++m) {
      Vector& phi = b.modes[static_cast<std::size_t>(m)];
      for (int i = 0; i < m; ++i) {
        const Vector& q = b.modes[static_cast<std::size_t>(i)];
        phi -= x(phi, q) * q;
      }
      phi /= std::sqrt(x.norm2(phi));
    }
  }
  gram_matrices(b, ops);
  return b;
}

PodBasis truncate(const PodBasis& basis, int r, const FeOperators& ops) {
  if (r < 1 || r > basis.r) fail_input("truncate: rank out of range");
  PodBasis b = basis;
  b.r = r;
  b.modes.resize(static_cast<std::size_t>(r));
  gram_matrices(b, ops);
  return b;
}

Projection project_onto_basis(const PodBasis& basis, const InnerProduct& x, const Vector& v, int r) {
  if (r < 0) r = basis.r;
  if (r > basis.r) fail_input("project_onto_basis: rank exceeds basis size");
  Projection p;
  p.coords.resize(r);
  const Vector xv = *x.op * v;
  p.lifted = Vector::Zero(v.size());
  for (int k = 0; k < r; ++k) {
    p.coords[k] = basis.modes[static_cast<std::size_t>(k)].dot(xv);
    p.lifted += p.coords[k] * basis.modes[static_cast<std::size_t>(k)];
  }
  return p;
}

GramReport pod_gram_matrices(const PodBasis& basis) {
  GramReport g;
  g.mass = basis.mass;
  g.stiffness = basis.stiffness;
  const SymmetricEigen em = jacobi_eigen(basis.mass);
  const double min_mass = em.values[em.values.size() - 1];
  if (!(min_mass > 0.0)) fail_numerical("pod_gram_matrices: POD mass matrix is singular");
  g.inv_mass_norm = 1.0 / min_mass;
  g.stiffness_norm = jacobi_eigen(basis.stiffness).values[0];
  return g;
}

double mean_square_projection_error(const SnapshotSet& set, const PodBasis& basis, const InnerProduct& x, int r) {
  double s = 0.0;
  for (const auto& y : set.members) {
    const Projection p = project_onto_basis(basis, x, y, r);
    s += x.norm2(y - p.lifted);
  }
  return s / set.size();
}

Vector lift(const PodBasis& basis, const Eigen::VectorXd& coords) {
  Vector u = Vector::Zero(basis.modes.front().size());
  for (Eigen::Index k = 0; k < coords.size(); ++k) u += coords[k] * basis.modes[static_cast<std::size_t>(k)];
  return u;
}

}  // namespace tdpod
