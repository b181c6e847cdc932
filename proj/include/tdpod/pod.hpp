#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tdpod/assembly.hpp"
#include "tdpod/snapshot_sets.hpp"

namespace tdpod {

enum class InnerProductTag { L2, H1 };

InnerProductTag parse_inner_product(const std::string& s);
std::string to_string(InnerProductTag x);

/// (u, v)_X = u^T K v with K the velocity mass matrix (L2) or the velocity
/// stiffness matrix (H1, the H^1_0 seminorm inner product).
struct InnerProduct {
  InnerProductTag tag;
  const SparseMatrix* op;

  double operator()(const Vector& a, const Vector& b) const { return a.dot(*op * b); }
  double norm2(const Vector& a) const { return a.dot(*op * a); }
};

InnerProduct make_inner_product(InnerProductTag tag, const FeOperators& ops);

/// Rank selection: either an explicit rank or a cut on relative singular values.
struct RankRule {
  int r = 0;                       // > 0: explicit rank
  double threshold = 0.0;          // used when r == 0: keep sigma_rel >= threshold
  double rank_tolerance = 1e-12;   // lambda_k > rank_tolerance * lambda_1 counts toward d_v

  static RankRule explicit_rank(int r) { return {r, 0.0, 1e-12}; }
  static RankRule relative_threshold(double t) { return {0, t, 1e-12}; }
  /// All numerically non-zero modes.
  static RankRule full() { return {0, 0.0, 1e-12}; }
};

/// Default truncation thresholds on relative singular values.
double default_threshold(InnerProductTag tag);

struct PodBasis {
  InnerProductTag tag = InnerProductTag::L2;
  int r = 0;
  int d_v = 0;
  int n_snapshots = 0;
  Eigen::VectorXd eigenvalues;  // all N eigenvalues of the correlation matrix, non-increasing
  std::vector<Vector> modes;    // first r basis functions
  Eigen::MatrixXd mass;         // M^v_{ij} = (phi_j, phi_i)_{L2}
  Eigen::MatrixXd stiffness;    // S^v_{ij} = (grad phi_j, grad phi_i)
  double tau = 1.0;
  std::string variant;

  /// sum_{k > r} lambda_k over all eigenvalues (negative round-off clipped).
  double tail(int r) const;
  double trace() const;
  /// sigma_k / (sum sigma^2)^{1/2} for k = 1..d_v.
  Eigen::VectorXd relative_singular_values() const;
};

/// k_ij = (1/N) (y_i, y_j)_X.
Eigen::MatrixXd correlation_matrix(const SnapshotSet& set, const InnerProduct& x);

PodBasis compute_pod_basis(const SnapshotSet& set, const InnerProduct& x, const FeOperators& ops,
                           const RankRule& rule);

/// Keeps the first r modes (and recomputes the Gram matrices).
PodBasis truncate(const PodBasis& basis, int r, const FeOperators& ops);

struct Projection {
  Eigen::VectorXd coords;
  Vector lifted;
};

Projection project_onto_basis(const PodBasis& basis, const InnerProduct& x, const Vector& v, int r = -1);

struct GramReport {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
  double inv_mass_norm;  // ||(M^v)^{-1}||_2
  double stiffness_norm; // ||S^v||_2
};

GramReport pod_gram_matrices(const PodBasis& basis);

/// (1/N) sum_j ||y_j - P_r y_j||_X^2 for the given basis rank.
double mean_square_projection_error(const SnapshotSet& set, const PodBasis& basis, const InnerProduct& x, int r);

/// Lifts reduced coordinates: sum_k a_k phi_k.
Vector lift(const PodBasis& basis, const Eigen::VectorXd& coords);

}  // namespace tdpod
