#include "tdpod/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "tdpod/error.hpp"
#include "tdpod/io.hpp"

namespace tdpod {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Two copies of a scalar operator on the diagonal blocks.
SparseMatrix block_diagonal(const SparseMatrix& s) {
  const int n = static_cast<int>(s.rows());
  std::vector<Triplet> t;
  t.reserve(2 * static_cast<std::size_t>(s.nonZeros()));
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < s.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(s, i); it; ++it)
        t.emplace_back(k * n + static_cast<int>(it.row()), k * n + static_cast<int>(it.col()), it.value());
  return from_triplets(2 * n, 2 * n, t);
}

// Physical-space data of one cell at one quadrature point.
struct QuadData {
  double weight;
  Point x;
  const double* phi;
  double gx[16];
  double gy[16];
};

constexpr int kMaxLocal = 16;

}  // namespace

ReferenceTables::ReferenceTables(const LagrangeElement& element, const TriangleRule& r)
    : rule(r), n_local(element.n_local()) {
  const std::size_t nq = rule.size();
  value.resize(nq * static_cast<std::size_t>(n_local));
  dxi.resize(value.size());
  deta.resize(value.size());
  for (std::size_t q = 0; q < nq; ++q) {
    const std::size_t off = q * static_cast<std::size_t>(n_local);
    element.values(rule.xi[q], rule.eta[q], &value[off]);
    element.gradients(rule.xi[q], rule.eta[q], &dxi[off], &deta[off]);
  }
}

Assembler::Assembler(std::shared_ptr<const TaylorHoodSpace> space)
    : space_(std::move(space)),
      velocity_tables_(space_->velocity().element(),
                       triangle_rule(std::max(2 * space_->degree() + 1, 3 * space_->degree() - 1))),
      pressure_tables_(space_->pressure().element(), velocity_tables_.rule),
      error_tables_(space_->velocity().element(), triangle_rule(2 * space_->degree() + 6)) {
  if (space_->velocity().n_local() > kMaxLocal) fail_input("Assembler: element degree too high");
  const std::size_t nc = space_->mesh().n_triangles();
  geometry_.reserve(nc);
  for (std::size_t c = 0; c < nc; ++c) geometry_.push_back(cell_geometry(space_->mesh(), c));
}

template <class Fn>
void Assembler::for_each_quad_point(const ReferenceTables& tab, Fn&& fn) const {
  const std::size_t nc = geometry_.size();
  const int nl = tab.n_local;
  QuadData qd{};
  for (std::size_t c = 0; c < nc; ++c) {
    const CellGeometry& g = geometry_[c];
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const std::size_t off = q * static_cast<std::size_t>(nl);
      qd.weight = tab.rule.weight[q] * g.det;
      qd.x = g.map(tab.rule.xi[q], tab.rule.eta[q]);
      qd.phi = &tab.value[off];
      for (int a = 0; a < nl; ++a) {
        const double dx = tab.dxi[off + static_cast<std::size_t>(a)];
        const double de = tab.deta[off + static_cast<std::size_t>(a)];
        qd.gx[a] = g.inv_t[0][0] * dx + g.inv_t[0][1] * de;
        qd.gy[a] = g.inv_t[1][0] * dx + g.inv_t[1][1] * de;
      }
      fn(c, qd);
    }
  }
}

namespace {

struct VelocityAtPoint {
  double u[2];
  double grad[2][2];
  double div() const { return grad[0][0] + grad[1][1]; }
};

VelocityAtPoint eval_velocity(const Vector& u, int n, const int* dofs, int nl, const QuadData& qd) {
  VelocityAtPoint v{};
  for (int a = 0; a < nl; ++a) {
    const double u0 = u[dofs[a]], u1 = u[n + dofs[a]];
    v.u[0] += u0 * qd.phi[a];
    v.u[1] += u1 * qd.phi[a];
    v.grad[0][0] += u0 * qd.gx[a];
    v.grad[0][1] += u0 * qd.gy[a];
    v.grad[1][0] += u1 * qd.gx[a];
    v.grad[1][1] += u1 * qd.gy[a];
  }
  return v;
}

}  // namespace

FeOperators Assembler::bilinear_forms() const {
  const ScalarSpace& vs = space_->velocity();
  const ScalarSpace& ps = space_->pressure();
  const int n = vs.n_dofs();
  const int np = ps.n_dofs();
  const int nl = vs.n_local();
  const int npl = ps.n_local();

  std::vector<Triplet> mass, stiff, gd, div;
  const std::size_t nq = velocity_tables_.rule.size();
  const std::size_t nc = geometry_.size();
  mass.reserve(nc * static_cast<std::size_t>(nl * nl));
  stiff.reserve(mass.capacity());
  gd.reserve(4 * mass.capacity());
  div.reserve(nc * static_cast<std::size_t>(2 * nl * npl));
  Vector pmean = Vector::Zero(np);

  double me[kMaxLocal][kMaxLocal], ae[kMaxLocal][kMaxLocal], ge[2][2][kMaxLocal][kMaxLocal], be[2][kMaxLocal][kMaxLocal];
  double pm[kMaxLocal];
  std::size_t q_in_cell = 0;
  std::size_t current = static_cast<std::size_t>(-1);

  auto flush = [&](std::size_t c) {
    const int* vd = vs.cell_dofs(c);
    const int* pd = ps.cell_dofs(c);
    for (int a = 0; a < nl; ++a) {
      for (int b = 0; b < nl; ++b) {
        mass.emplace_back(vd[a], vd[b], me[a][b]);
        stiff.emplace_back(vd[a], vd[b], ae[a][b]);
        for (int ci = 0; ci < 2; ++ci)
          for (int di = 0; di < 2; ++di) gd.emplace_back(ci * n + vd[a], di * n + vd[b], ge[ci][di][a][b]);
      }
    }
    for (int k = 0; k < npl; ++k) {
      pmean[pd[k]] += pm[k];
      for (int b = 0; b < nl; ++b)
        for (int di = 0; di < 2; ++di) div.emplace_back(pd[k], di * n + vd[b], be[di][k][b]);
    }
  };
  auto reset = [&] {
    std::fill(&me[0][0], &me[0][0] + kMaxLocal * kMaxLocal, 0.0);
    std::fill(&ae[0][0], &ae[0][0] + kMaxLocal * kMaxLocal, 0.0);
    std::fill(&ge[0][0][0][0], &ge[0][0][0][0] + 4 * kMaxLocal * kMaxLocal, 0.0);
    std::fill(&be[0][0][0], &be[0][0][0] + 2 * kMaxLocal * kMaxLocal, 0.0);
    std::fill(pm, pm + kMaxLocal, 0.0);
  };

  reset();
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    if (c != current) {
      if (current != static_cast<std::size_t>(-1)) {
        flush(current);
        reset();
      }
      current = c;
      q_in_cell = 0;
    }
    const double* chi = &pressure_tables_.value[q_in_cell * static_cast<std::size_t>(npl)];
    const double w = qd.weight;
    for (int a = 0; a < nl; ++a) {
      const double ga[2] = {qd.gx[a], qd.gy[a]};
      for (int b = 0; b < nl; ++b) {
        const double gb[2] = {qd.gx[b], qd.gy[b]};
        me[a][b] += w * qd.phi[a] * qd.phi[b];
        ae[a][b] += w * (ga[0] * gb[0] + ga[1] * gb[1]);
        for (int ci = 0; ci < 2; ++ci)
          for (int di = 0; di < 2; ++di) ge[ci][di][a][b] += w * ga[ci] * gb[di];
      }
    }
    for (int k = 0; k < npl; ++k) {
      pm[k] += w * chi[k];
      for (int b = 0; b < nl; ++b) {
        be[0][k][b] += w * chi[k] * qd.gx[b];
        be[1][k][b] += w * chi[k] * qd.gy[b];
      }
    }
    ++q_in_cell;
    (void)nq;
  });
  if (current != static_cast<std::size_t>(-1)) flush(current);

  FeOperators ops;
  ops.mass_scalar = from_triplets(n, n, mass);
  ops.stiffness_scalar = from_triplets(n, n, stiff);
  ops.mass = block_diagonal(ops.mass_scalar);
  ops.stiffness = block_diagonal(ops.stiffness_scalar);
  ops.grad_div = from_triplets(2 * n, 2 * n, gd);
  ops.divergence = from_triplets(np, 2 * n, div);
  ops.pressure_mean = pmean;
  return ops;
}

double Assembler::trilinear(const Vector& u, const Vector& v, const Vector& w) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  double sum = 0.0;
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    const int* dofs = vs.cell_dofs(c);
    const VelocityAtPoint U = eval_velocity(u, n, dofs, nl, qd);
    const VelocityAtPoint V = eval_velocity(v, n, dofs, nl, qd);
    double W[2] = {0.0, 0.0};
    for (int a = 0; a < nl; ++a) {
      W[0] += w[dofs[a]] * qd.phi[a];
      W[1] += w[n + dofs[a]] * qd.phi[a];
    }
    double val = 0.0;
    for (int ci = 0; ci < 2; ++ci) {
      const double conv = U.u[0] * V.grad[ci][0] + U.u[1] * V.grad[ci][1];
      val += (conv + 0.5 * U.div() * V.u[ci]) * W[ci];
    }
    sum += qd.weight * val;
  });
  return sum;
}

SparseMatrix Assembler::convection(const Vector& u) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  std::vector<Triplet> t;
  t.reserve(geometry_.size() * velocity_tables_.rule.size() * static_cast<std::size_t>(2 * nl * nl));
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    const int* dofs = vs.cell_dofs(c);
    const VelocityAtPoint U = eval_velocity(u, n, dofs, nl, qd);
    const double half_div = 0.5 * U.div();
    for (int a = 0; a < nl; ++a) {
      for (int b = 0; b < nl; ++b) {
        const double val = qd.weight * qd.phi[a] * (U.u[0] * qd.gx[b] + U.u[1] * qd.gy[b] + half_div * qd.phi[b]);
        t.emplace_back(dofs[a], dofs[b], val);
        t.emplace_back(n + dofs[a], n + dofs[b], val);
      }
    }
  });
  return from_triplets(2 * n, 2 * n, t);
}

SparseMatrix Assembler::convection_derivative(const Vector& u) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  std::vector<Triplet> t;
  t.reserve(geometry_.size() * velocity_tables_.rule.size() * static_cast<std::size_t>(4 * nl * nl));
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    const int* dofs = vs.cell_dofs(c);
    const VelocityAtPoint U = eval_velocity(u, n, dofs, nl, qd);
    for (int a = 0; a < nl; ++a) {
      const double wa = qd.weight * qd.phi[a];
      for (int b = 0; b < nl; ++b) {
        const double gb[2] = {qd.gx[b], qd.gy[b]};
        for (int ci = 0; ci < 2; ++ci)
          for (int di = 0; di < 2; ++di)
            t.emplace_back(ci * n + dofs[a], di * n + dofs[b],
                           wa * (qd.phi[b] * U.grad[ci][di] + 0.5 * gb[di] * U.u[ci]));
      }
    }
  });
  return from_triplets(2 * n, 2 * n, t);
}

SparseMatrix Assembler::convection_jacobian(const Vector& u) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  std::vector<Triplet> t;
  t.reserve(geometry_.size() * velocity_tables_.rule.size() * static_cast<std::size_t>(4 * nl * nl));
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    const int* dofs = vs.cell_dofs(c);
    const VelocityAtPoint U = eval_velocity(u, n, dofs, nl, qd);
    const double half_div = 0.5 * U.div();
    for (int a = 0; a < nl; ++a) {
      const double wa = qd.weight * qd.phi[a];
      for (int b = 0; b < nl; ++b) {
        const double gb[2] = {qd.gx[b], qd.gy[b]};
        const double nval = U.u[0] * gb[0] + U.u[1] * gb[1] + half_div * qd.phi[b];
        for (int ci = 0; ci < 2; ++ci)
          for (int di = 0; di < 2; ++di) {
            double val = qd.phi[b] * U.grad[ci][di] + 0.5 * gb[di] * U.u[ci];
            if (ci == di) val += nval;
            t.emplace_back(ci * n + dofs[a], di * n + dofs[b], wa * val);
          }
      }
    }
  });
  return from_triplets(2 * n, 2 * n, t);
}

Vector Assembler::convection_apply(const Vector& u, const Vector& v) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  Vector out = Vector::Zero(2 * n);
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    const int* dofs = vs.cell_dofs(c);
    const VelocityAtPoint U = eval_velocity(u, n, dofs, nl, qd);
    const VelocityAtPoint V = eval_velocity(v, n, dofs, nl, qd);
    double r[2];
    for (int ci = 0; ci < 2; ++ci)
      r[ci] = qd.weight * (U.u[0] * V.grad[ci][0] + U.u[1] * V.grad[ci][1] + 0.5 * U.div() * V.u[ci]);
    for (int a = 0; a < nl; ++a) {
      out[dofs[a]] += r[0] * qd.phi[a];
      out[n + dofs[a]] += r[1] * qd.phi[a];
    }
  });
  return out;
}

Vector Assembler::load(const VectorField& f, double t) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  Vector out = Vector::Zero(2 * n);
  for_each_quad_point(error_tables_, [&](std::size_t c, const QuadData& qd) {
    const int* dofs = vs.cell_dofs(c);
    const auto fv = f(qd.x, t);
    for (int a = 0; a < nl; ++a) {
      out[dofs[a]] += qd.weight * fv[0] * qd.phi[a];
      out[n + dofs[a]] += qd.weight * fv[1] * qd.phi[a];
    }
  });
  return out;
}

double Assembler::l2_error(const Vector& u, const ExactVelocity& exact, double t) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  double sum = 0.0;
  for_each_quad_point(error_tables_, [&](std::size_t c, const QuadData& qd) {
    const VelocityAtPoint U = eval_velocity(u, n, vs.cell_dofs(c), nl, qd);
    const VelocitySample e = exact(qd.x, t);
    const double d0 = U.u[0] - e.u[0], d1 = U.u[1] - e.u[1];
    sum += qd.weight * (d0 * d0 + d1 * d1);
  });
  return std::sqrt(sum);
}

double Assembler::h1_seminorm_error(const Vector& u, const ExactVelocity& exact, double t) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  double sum = 0.0;
  for_each_quad_point(error_tables_, [&](std::size_t c, const QuadData& qd) {
    const VelocityAtPoint U = eval_velocity(u, n, vs.cell_dofs(c), nl, qd);
    const VelocitySample e = exact(qd.x, t);
    for (int ci = 0; ci < 2; ++ci)
      for (int di = 0; di < 2; ++di) {
        const double d = U.grad[ci][di] - e.grad[ci][di];
        sum += qd.weight * d * d;
      }
  });
  return std::sqrt(sum);
}

double Assembler::max_gradient(const Vector& u) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  double m = 0.0;
  for_each_quad_point(velocity_tables_, [&](std::size_t c, const QuadData& qd) {
    const VelocityAtPoint U = eval_velocity(u, n, vs.cell_dofs(c), nl, qd);
    double s = 0.0;
    for (const auto& row : U.grad)
      for (double g : row) s += g * g;
    m = std::max(m, std::sqrt(s));
  });
  return m;
}

double Assembler::gradient_l4(const Vector& u) const {
  const ScalarSpace& vs = space_->velocity();
  const int n = vs.n_dofs();
  const int nl = vs.n_local();
  double sum = 0.0;
  for_each_quad_point(error_tables_, [&](std::size_t c, const QuadData& qd) {
    const VelocityAtPoint U = eval_velocity(u, n, vs.cell_dofs(c), nl, qd);
    double s = 0.0;
    for (const auto& row : U.grad)
      for (double g : row) s += g * g;
    sum += qd.weight * s * s;
  });
  return std::pow(sum, 0.25);
}

double Assembler::max_nodal(const Vector& u) const {
  const int n = space_->n_velocity_scalar();
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::hypot(u[i], u[n + i]));
  return m;
}

FeOperators assemble_bilinear_forms(const Assembler& assembler) { return assembler.bilinear_forms(); }

double trilinear_form(const Assembler& assembler, const Vector& u, const Vector& v, const Vector& w) {
  return assembler.trilinear(u, v, w);
}

SparseMatrix assemble_convection(const Assembler& assembler, const Vector& u) { return assembler.convection(u); }

Vector assemble_load(const Assembler& assembler, const VectorField& f, double t) { return assembler.load(f, t); }

void write_sparse_coo_csv(const SparseMatrix& m, const std::filesystem::path& path) {
  CsvWriter w(path, {"row", "col", "value"});
  for (int i = 0; i < m.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      w.cell(static_cast<long long>(it.row())).cell(static_cast<long long>(it.col())).cell(it.value());
      w.end_row();
    }
}

double max_asymmetry(const SparseMatrix& m) {
  const SparseMatrix t = m.transpose();
  const SparseMatrix d = m - t;
  double mx = 0.0;
  for (int i = 0; i < d.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(d, i); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

}  // namespace tdpod
