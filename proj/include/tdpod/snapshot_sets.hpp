#pragma once

#include <string>
#include <vector>

#include "tdpod/fom_solver.hpp"

namespace tdpod {

enum class SnapshotVariant {
  InitialPlusDerivatives,  // {sqrt(N) u^0, tau u_t^1, ..., tau u_t^M}
  MeanPlusDerivatives,     // {sqrt(N) mean(u), tau u_t^1, ..., tau u_t^M}
  Fluctuations,            // {u^j - mean(u)}, j = 0..M
  DifferenceQuotients,     // {tau (u^j - u^{j-1}) / dt}, j = 1..M
  RawVelocities,           // {u^j}, j = 0..M
};

SnapshotVariant parse_variant(const std::string& s);
std::string to_string(SnapshotVariant v);

struct SnapshotSet {
  std::vector<Vector> members;
  SnapshotVariant variant = SnapshotVariant::InitialPlusDerivatives;
  double tau = 1.0;
  std::string source;

  int size() const { return static_cast<int>(members.size()); }
};

/// Temporal mean (1/(M+1)) sum_j u^j, accumulated in extended precision.
Vector temporal_mean(const std::vector<Vector>& series);

/// Same trajectory with the temporal mean subtracted from every velocity;
/// derivatives and times are unchanged.
Trajectory fluctuation_trajectory(const Trajectory& traj);

SnapshotSet build_snapshot_set(const Trajectory& traj, SnapshotVariant variant, double tau);

}  // namespace tdpod
