#include "tdpod/snapshot_sets.hpp"

#include <cmath>

#include "tdpod/error.hpp"

namespace tdpod {

SnapshotVariant parse_variant(const std::string& s) {
  if (s == "initial_plus_derivatives") return SnapshotVariant::InitialPlusDerivatives;
  if (s == "mean_plus_derivatives") return SnapshotVariant::MeanPlusDerivatives;
  if (s == "fluctuations") return SnapshotVariant::Fluctuations;
  if (s == "difference_quotients") return SnapshotVariant::DifferenceQuotients;
  if (s == "raw_velocities") return SnapshotVariant::RawVelocities;
  fail_input("unknown snapshot variant '" + s + "'");
}

std::string to_string(SnapshotVariant v) {
  switch (v) {
    case SnapshotVariant::InitialPlusDerivatives: return "initial_plus_derivatives";
    case SnapshotVariant::MeanPlusDerivatives: return "mean_plus_derivatives";
    case SnapshotVariant::Fluctuations: return "fluctuations";
    case SnapshotVariant::DifferenceQuotients: return "difference_quotients";
    case SnapshotVariant::RawVelocities: return "raw_velocities";
  }
  return "unknown";
}

Vector temporal_mean(const std::vector<Vector>& series) {
  if (series.empty()) fail_input("temporal_mean: empty series");
  const Eigen::Index n = series.front().size();
  std::vector<long double> acc(static_cast<std::size_t>(n), 0.0L);
  for (const auto& v : series)
    for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += v[i];
  Vector mean(n);
  const long double count = static_cast<long double>(series.size());
  for (Eigen::Index i = 0; i < n; ++i) mean[i] = static_cast<double>(acc[static_cast<std::size_t>(i)] / count);
  return mean;
}

Trajectory fluctuation_trajectory(const Trajectory& traj) {
  Trajectory out = traj;
  const Vector mean = temporal_mean(traj.velocities);
  for (auto& v : out.velocities) v -= mean;
  return out;
}

SnapshotSet build_snapshot_set(const Trajectory& traj, SnapshotVariant variant, double tau) {
  if (traj.velocities.empty()) fail_input("build_snapshot_set: empty trajectory");
  if (!(tau > 0.0)) fail_input("build_snapshot_set: time scale must be positive");
  const int m = traj.steps();
  const bool needs_derivatives = variant == SnapshotVariant::InitialPlusDerivatives ||
                                 variant == SnapshotVariant::MeanPlusDerivatives ||
                                 variant == SnapshotVariant::DifferenceQuotients;
  if (needs_derivatives && m < 1) fail_input("build_snapshot_set: variant needs at least one time step");
  if ((variant == SnapshotVariant::InitialPlusDerivatives || variant == SnapshotVariant::MeanPlusDerivatives) &&
      traj.derivatives.size() != traj.velocities.size())
    fail_input("build_snapshot_set: trajectory has no Galerkin time derivatives");

  SnapshotSet set;
  set.variant = variant;
  set.tau = tau;
  const double sqrt_n = std::sqrt(static_cast<double>(m + 1));
  switch (variant) {
    case SnapshotVariant::InitialPlusDerivatives:
    case SnapshotVariant::MeanPlusDerivatives: {
      const Vector anchor =
          variant == SnapshotVariant::InitialPlusDerivatives ? traj.velocities.front() : temporal_mean(traj.velocities);
      set.members.push_back(sqrt_n * anchor);
      for (int j = 1; j <= m; ++j) set.members.push_back(tau * traj.derivatives[static_cast<std::size_t>(j)]);
      break;
    }
    case SnapshotVariant::Fluctuations: {
      const Vector mean = temporal_mean(traj.velocities);
      for (const auto& v : traj.velocities) set.members.push_back(v - mean);
      break;
    }
    case SnapshotVariant::DifferenceQuotients: {
      const long double scale = static_cast<long double>(tau) / static_cast<long double>(traj.dt);
      for (int j = 1; j <= m; ++j) {
        const Vector& a = traj.velocities[static_cast<std::size_t>(j)];
        const Vector& b = traj.velocities[static_cast<std::size_t>(j - 1)];
        Vector d(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i)
          d[i] = static_cast<double>((static_cast<long double>(a[i]) - static_cast<long double>(b[i])) * scale);
        set.members.push_back(std::move(d));
      }
      break;
    }
    case SnapshotVariant::RawVelocities:
      set.members = traj.velocities;
      break;
  }
  return set;
}

}  // namespace tdpod
