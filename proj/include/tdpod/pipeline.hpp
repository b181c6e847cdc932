#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdpod/diagnostics.hpp"
#include "tdpod/io.hpp"
#include "tdpod/rom_solver.hpp"
#include "tdpod/storage.hpp"

namespace tdpod {

/// Everything a run needs, read from a JSON object. Keys absent from the
/// object keep the value of `base`; unknown keys are rejected.
struct RunConfig {
  int nx = 16;
  int ny = 16;
  int levels = 0;  // uniform refinements applied after the nx x ny grid
  int degree = 2;
  double nu = 1e-2;
  double mu = 0.01;
  double dt = 1.0 / 64.0;
  double final_time = 1.0;
  Integrator integrator = Integrator::Bdf2;
  std::string problem = "manufactured";
  SnapshotVariant variant = SnapshotVariant::InitialPlusDerivatives;
  std::optional<double> tau;  // defaults to final_time
  InnerProductTag x = InnerProductTag::L2;
  int r = 0;                        // 0: use the truncation threshold
  std::optional<double> threshold;  // defaults per inner product
  std::string output;
  unsigned long long seed = 20240611ULL;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  // studies
  std::string study_kind = "space";  // space | time
  std::vector<int> meshes{8, 16, 32};
  std::vector<double> dts{1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0};
  double reference_dt = 1.0 / 1024.0;
  std::vector<SnapshotVariant> variants{SnapshotVariant::Fluctuations, SnapshotVariant::MeanPlusDerivatives,
                                        SnapshotVariant::DifferenceQuotients};

  static RunConfig from_json(const Json& j);
  static RunConfig from_json(const Json& j, const RunConfig& base);
  Json to_json() const;
  void validate() const;
  double effective_tau() const { return tau ? *tau : final_time; }
  RankRule rank_rule() const;
  FomConfig fom_config() const;
  RomConfig rom_config() const;
};

/// Mesh, Taylor-Hood space, assembler and the bilinear forms.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const TaylorHoodSpace> space;
  std::shared_ptr<const Assembler> assembler;
  FeOperators ops;
};

Discretization make_discretization(int nx, int ny, int levels, int degree);
Discretization make_discretization(const RunConfig& cfg);

/// Snapshot set of the requested variant; fluctuation-based variants are
/// built on the mean-free trajectory and report the mean as ROM offset.
struct PreparedSet {
  SnapshotSet set;
  std::optional<Vector> offset;
};
PreparedSet prepare_snapshot_set(const Trajectory& traj, SnapshotVariant variant, double tau,
                                 bool center_on_mean);

/// ROM solve for a basis (optionally around an offset) on the FOM time grid.
struct RomRun {
  RomOperators ops;
  RomTrajectory reduced;
  std::vector<Vector> lifted;
};
RomRun solve_rom(const FomSolver& fom, const PodBasis& basis, const InnerProduct& x, const Vector& u0,
                 const RomConfig& cfg, const Vector* offset = nullptr);

struct ConvergenceStudy {
  std::string kind;
  std::vector<RateRow> fom;
  std::vector<RateRow> rom;  // time studies only: fixed basis, ROM against its own fine-step run
  int rom_rank = 0;
};
/// Spatial study: errors at the final time against the exact solution on
/// nx = ny = meshes[i]. Temporal study: final-time errors against a same-mesh
/// run with reference_dt.
ConvergenceStudy run_convergence_study(const RunConfig& cfg);

struct CompareEntry {
  SnapshotVariant variant;
  InnerProductTag x;
  PodBasis basis;  // all d_v modes
  int r = 0;
  ErrorSeries projection;
  ErrorSeries rom;
};
struct CompareSetsResult {
  Trajectory trajectory;
  std::vector<CompareEntry> entries;
};
/// Every configured variant, built on the mean-free trajectory and reduced
/// around the temporal mean, in both inner products. Within one inner
/// product all variants use the same rank.
CompareSetsResult run_compare_sets(const RunConfig& cfg);

/// Identity, bound and stability checks on one configuration.
std::vector<CheckRecord> run_invariant_checks(const RunConfig& cfg, ConstantsReport* constants = nullptr);
/// Checks whose id starts with this prefix are reported but never counted as failures.
inline constexpr const char* kWarningPrefix = "warning:";

// Command implementations behind the command-line tool. Each reads/writes
// the documented directory formats below `outdir`.
void command_fom_run(const Json& config, const std::filesystem::path& outdir);
void command_pod_build(const Json& config, const std::filesystem::path& traj_dir,
                       const std::filesystem::path& outdir);
void command_rom_run(const Json& config, const std::filesystem::path& traj_dir,
                     const std::filesystem::path& basis_dir, const std::filesystem::path& outdir);
void command_study_convergence(const Json& config, const std::filesystem::path& outdir);
void command_study_compare_sets(const Json& config, const std::filesystem::path& outdir);
/// Returns the number of failed checks.
int command_check_invariants(const Json& config, const std::filesystem::path& outdir);
void command_report(const Json& config, const std::filesystem::path& traj_dir,
                    const std::filesystem::path& basis_dir, const std::filesystem::path& outdir);

}  // namespace tdpod
