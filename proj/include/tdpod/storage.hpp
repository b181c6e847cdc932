#pragma once

#include <filesystem>

#include "tdpod/io.hpp"
#include "tdpod/pod.hpp"
#include "tdpod/rom_solver.hpp"

namespace tdpod {

// Trajectory directory: meta.json (times, dt, sizes, caller metadata under
// "config") plus u_NNNN.bin, ut_NNNN.bin and p_NNNN.bin per time level.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir, const Json& config);
Trajectory load_trajectory(const std::filesystem::path& dir, Json* config = nullptr);

// Snapshot set directory: meta.json (variant, tau, source) plus y_NNNN.bin.
void save_snapshot_set(const SnapshotSet& set, const std::filesystem::path& dir, const Json& config);
SnapshotSet load_snapshot_set(const std::filesystem::path& dir, Json* config = nullptr);

// Basis directory: meta.json (X, tau, variant, r, d_v, N), eigenvalues.csv
// (k,lambda_k) and phi_NNNN.bin. Gram matrices are recomputed from `ops` on load.
void save_basis(const PodBasis& basis, const std::filesystem::path& dir, const Json& config);
PodBasis load_basis(const std::filesystem::path& dir, const FeOperators& ops, Json* config = nullptr);

/// Reduced trajectory CSV with header t,a_1,...,a_r.
void write_reduced_trajectory_csv(const RomTrajectory& tr, const std::filesystem::path& path);

/// singular_values.csv rows: variant, x, k, sigma_k, sigma_rel for k = 1..d_v.
void append_singular_values(CsvWriter& w, const PodBasis& basis);

}  // namespace tdpod
