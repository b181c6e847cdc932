#include "tdpod/storage.hpp"

#include <cmath>
#include <cstdio>

#include "tdpod/error.hpp"

namespace fs = std::filesystem;

namespace tdpod {

namespace {

std::string indexed(const char* prefix, std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu.bin", prefix, j);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail_io("cannot create directory " + dir.string() + ": " + ec.message());
}

void save_series(const std::vector<Vector>& s, const fs::path& dir, const char* prefix) {
  for (std::size_t j = 0; j < s.size(); ++j) save_vector_binary(s[j], dir / indexed(prefix, j));
}

std::vector<Vector> load_series(const fs::path& dir, const char* prefix, std::size_t count) {
  std::vector<Vector> s;
  s.reserve(count);
  for (std::size_t j = 0; j < count; ++j) s.push_back(load_vector_binary(dir / indexed(prefix, j)));
  return s;
}

template <class T>
T meta_value(const Json& meta, const char* key, const fs::path& dir) {
  if (!meta.contains(key)) fail_io(dir.string() + "/meta.json: missing key '" + key + "'");
  try {
    return meta.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail_io(dir.string() + "/meta.json: bad value for '" + key + "'");
  }
}

}  // namespace

void save_trajectory(const Trajectory& traj, const fs::path& dir, const Json& config) {
  ensure_dir(dir);
  Json meta;
  meta["kind"] = "trajectory";
  meta["dt"] = traj.dt;
  meta["times"] = traj.times;
  meta["n_velocity"] = traj.velocities.empty() ? 0 : traj.velocities.front().size();
  meta["n_pressure"] = traj.pressures.empty() ? 0 : traj.pressures.front().size();
  meta["has_derivatives"] = !traj.derivatives.empty();
  meta["config"] = config;
  write_json(meta, dir / "meta.json");
  save_series(traj.velocities, dir, "u");
  save_series(traj.derivatives, dir, "ut");
  save_series(traj.pressures, dir, "p");
}

Trajectory load_trajectory(const fs::path& dir, Json* config) {
  const Json meta = read_json(dir / "meta.json");
  if (meta.value("kind", std::string()) != "trajectory") fail_io(dir.string() + " is not a trajectory directory");
  Trajectory traj;
  traj.dt = meta_value<double>(meta, "dt", dir);
  traj.times = meta_value<std::vector<double>>(meta, "times", dir);
  const std::size_t n = traj.times.size();
  traj.velocities = load_series(dir, "u", n);
  if (meta_value<bool>(meta, "has_derivatives", dir)) traj.derivatives = load_series(dir, "ut", n);
  if (meta_value<long long>(meta, "n_pressure", dir) > 0) traj.pressures = load_series(dir, "p", n);
  const auto nv = meta_value<long long>(meta, "n_velocity", dir);
  for (const auto& u : traj.velocities)
    if (u.size() != nv) fail_io(dir.string() + ": velocity file size disagrees with meta.json");
  if (config) *config = meta.value("config", Json::object());
  return traj;
}

void save_snapshot_set(const SnapshotSet& set, const fs::path& dir, const Json& config) {
  ensure_dir(dir);
  Json meta;
  meta["kind"] = "snapshot_set";
  meta["variant"] = to_string(set.variant);
  meta["tau"] = set.tau;
  meta["source"] = set.source;
  meta["size"] = set.size();
  meta["config"] = config;
  write_json(meta, dir / "meta.json");
  save_series(set.members, dir, "y");
}

SnapshotSet load_snapshot_set(const fs::path& dir, Json* config) {
  const Json meta = read_json(dir / "meta.json");
  if (meta.value("kind", std::string()) != "snapshot_set") fail_io(dir.string() + " is not a snapshot set directory");
  SnapshotSet set;
  set.variant = parse_variant(meta_value<std::string>(meta, "variant", dir));
  set.tau = meta_value<double>(meta, "tau", dir);
  set.source = meta.value("source", std::string());
  set.members = load_series(dir, "y", meta_value<std::size_t>(meta, "size", dir));
  if (config) *config = meta.value("config", Json::object());
  return set;
}

void save_basis(const PodBasis& basis, const fs::path& dir, const Json& config) {
  ensure_dir(dir);
  Json meta;
  meta["kind"] = "pod_basis";
  meta["x"] = to_string(basis.tag);
  meta["tau"] = basis.tau;
  meta["variant"] = basis.variant;
  meta["r"] = basis.r;
  meta["d_v"] = basis.d_v;
  meta["n_snapshots"] = basis.n_snapshots;
  meta["config"] = config;
  write_json(meta, dir / "meta.json");
  CsvWriter w(dir / "eigenvalues.csv", {"k", "lambda_k"});
  for (Eigen::Index k = 0; k < basis.eigenvalues.size(); ++k) {
    w.cell(static_cast<long long>(k + 1));
    w.cell(basis.eigenvalues[k]);
    w.end_row();
  }
  save_series(basis.modes, dir, "phi");
}

PodBasis load_basis(const fs::path& dir, const FeOperators& ops, Json* config) {
  const Json meta = read_json(dir / "meta.json");
  if (meta.value("kind", std::string()) != "pod_basis") fail_io(dir.string() + " is not a basis directory");
  PodBasis b;
  b.tag = parse_inner_product(meta_value<std::string>(meta, "x", dir));
  b.tau = meta_value<double>(meta, "tau", dir);
  b.variant = meta_value<std::string>(meta, "variant", dir);
  b.r = meta_value<int>(meta, "r", dir);
  b.d_v = meta_value<int>(meta, "d_v", dir);
  b.n_snapshots = meta_value<int>(meta, "n_snapshots", dir);
  const auto rows = read_csv_rows(dir / "eigenvalues.csv");
  b.eigenvalues.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != 2) fail_io(dir.string() + "/eigenvalues.csv: expected two columns");
    b.eigenvalues[static_cast<Eigen::Index>(k)] = std::stod(rows[k][1]);
  }
  b.modes = load_series(dir, "phi", static_cast<std::size_t>(b.r));
  if (b.r > 0 && b.modes.front().size() != ops.mass.rows())
    fail_input(dir.string() + ": basis does not match the discretization");
  if (config) *config = meta.value("config", Json::object());
  return truncate(b, b.r, ops);
}

void write_reduced_trajectory_csv(const RomTrajectory& tr, const fs::path& path) {
  std::vector<std::string> header{"t"};
  const int r = tr.coords.empty() ? 0 : static_cast<int>(tr.coords.front().size());
  for (int k = 1; k <= r; ++k) header.push_back("a_" + std::to_string(k));
  CsvWriter w(path, header);
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    w.cell(tr.times[j]);
    for (int k = 0; k < r; ++k) w.cell(tr.coords[j][k]);
    w.end_row();
  }
}

void append_singular_values(CsvWriter& w, const PodBasis& basis) {
  const Eigen::VectorXd rel = basis.relative_singular_values();
  for (int k = 0; k < basis.d_v; ++k) {
    w.cell(basis.variant);
    w.cell(to_string(basis.tag));
    w.cell(k + 1);
    w.cell(std::sqrt(std::max(0.0, basis.eigenvalues[k])));
    w.cell(rel[k]);
    w.end_row();
  }
}

}  // namespace tdpod
