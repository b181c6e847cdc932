#include "tdpod/tdpod.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "tdpod/error.hpp"
#include "tdpod/pipeline.hpp"

struct tdpod_trajectory {
  tdpod::Trajectory traj;
};

struct tdpod_basis {
  int r = 0;
  int d_v = 0;
  std::vector<double> eigenvalues;
};

namespace {

thread_local std::string g_last_error;

tdpod_status status_of(tdpod::ErrorKind k) {
  switch (k) {
    case tdpod::ErrorKind::InvalidInput: return TDPOD_ERR_INVALID_ARGUMENT;
    case tdpod::ErrorKind::Numerical: return TDPOD_ERR_NUMERICAL;
    case tdpod::ErrorKind::Io: return TDPOD_ERR_IO;
  }
  return TDPOD_ERR_INTERNAL;
}

template <class Fn>
tdpod_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return TDPOD_OK;
  } catch (const tdpod::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return TDPOD_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TDPOD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TDPOD_ERR_INTERNAL;
  }
}

tdpod::Json parse_config(const char* s) {
  if (!s || !*s) return tdpod::Json::object();
  tdpod::Json j;
  try {
    j = tdpod::Json::parse(s);
  } catch (const nlohmann::json::parse_error& e) {
    tdpod::fail_input(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) tdpod::fail_input("config must be a JSON object");
  return j;
}

std::filesystem::path require_path(const char* p, const char* what) {
  if (!p || !*p) tdpod::fail_input(std::string(what) + " path is required");
  return p;
}

}  // namespace

extern "C" {

const char* tdpod_version(void) { return "0.1.0"; }

const char* tdpod_last_error(void) { return g_last_error.c_str(); }

tdpod_status tdpod_config_normalize(const char* config_json, char** normalized) {
  return guarded([&] {
    if (!normalized) tdpod::fail_input("normalized output pointer is null");
    const auto cfg = tdpod::RunConfig::from_json(parse_config(config_json));
    cfg.validate();
    const std::string s = cfg.to_json().dump(2);
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    *normalized = out;
  });
}

void tdpod_string_free(char* s) { std::free(s); }

tdpod_status tdpod_fom_run(const char* config_json, const char* outdir) {
  return guarded([&] { tdpod::command_fom_run(parse_config(config_json), require_path(outdir, "output")); });
}

tdpod_status tdpod_pod_build(const char* config_json, const char* traj_dir, const char* outdir) {
  return guarded([&] {
    tdpod::command_pod_build(parse_config(config_json), require_path(traj_dir, "trajectory"),
                             require_path(outdir, "output"));
  });
}

tdpod_status tdpod_rom_run(const char* config_json, const char* traj_dir, const char* basis_dir, const char* outdir) {
  return guarded([&] {
    tdpod::command_rom_run(parse_config(config_json), require_path(traj_dir, "trajectory"),
                           require_path(basis_dir, "basis"), require_path(outdir, "output"));
  });
}

tdpod_status tdpod_study_convergence(const char* config_json, const char* outdir) {
  return guarded(
      [&] { tdpod::command_study_convergence(parse_config(config_json), require_path(outdir, "output")); });
}

tdpod_status tdpod_study_compare_sets(const char* config_json, const char* outdir) {
  return guarded(
      [&] { tdpod::command_study_compare_sets(parse_config(config_json), require_path(outdir, "output")); });
}

tdpod_status tdpod_check_invariants(const char* config_json, const char* outdir, int* failed) {
  return guarded([&] {
    const int n = tdpod::command_check_invariants(parse_config(config_json), require_path(outdir, "output"));
    if (failed) *failed = n;
  });
}

tdpod_status tdpod_report(const char* config_json, const char* traj_dir, const char* basis_dir, const char* outdir) {
  return guarded([&] {
    tdpod::command_report(parse_config(config_json), require_path(traj_dir, "trajectory"),
                          require_path(basis_dir, "basis"), require_path(outdir, "output"));
  });
}

tdpod_status tdpod_trajectory_load(const char* dir, tdpod_trajectory** out) {
  return guarded([&] {
    if (!out) tdpod::fail_input("output handle pointer is null");
    auto h = std::make_unique<tdpod_trajectory>();
    h->traj = tdpod::load_trajectory(require_path(dir, "trajectory"));
    *out = h.release();
  });
}

void tdpod_trajectory_free(tdpod_trajectory* t) { delete t; }

size_t tdpod_trajectory_levels(const tdpod_trajectory* t) { return t ? t->traj.times.size() : 0; }

size_t tdpod_trajectory_dofs(const tdpod_trajectory* t) {
  return t && !t->traj.velocities.empty() ? static_cast<size_t>(t->traj.velocities.front().size()) : 0;
}

double tdpod_trajectory_time(const tdpod_trajectory* t, size_t j) {
  return t && j < t->traj.times.size() ? t->traj.times[j] : 0.0;
}

tdpod_status tdpod_trajectory_velocity(const tdpod_trajectory* t, size_t j, double* buf, size_t len) {
  return guarded([&] {
    if (!t || !buf) tdpod::fail_input("null trajectory handle or buffer");
    if (j >= t->traj.velocities.size()) tdpod::fail_input("time index out of range");
    const auto& u = t->traj.velocities[j];
    if (len != static_cast<size_t>(u.size())) tdpod::fail_input("buffer length differs from the DOF count");
    std::memcpy(buf, u.data(), len * sizeof(double));
  });
}

tdpod_status tdpod_basis_load(const char* dir, tdpod_basis** out) {
  return guarded([&] {
    if (!out) tdpod::fail_input("output handle pointer is null");
    const std::filesystem::path p = require_path(dir, "basis");
    const tdpod::Json meta = tdpod::read_json(p / "meta.json");
    if (meta.value("kind", std::string()) != "pod_basis") tdpod::fail_io(p.string() + " is not a basis directory");
    auto h = std::make_unique<tdpod_basis>();
    h->r = meta.at("r").get<int>();
    h->d_v = meta.at("d_v").get<int>();
    for (const auto& row : tdpod::read_csv_rows(p / "eigenvalues.csv")) {
      if (row.size() != 2) tdpod::fail_io("eigenvalues.csv: expected two columns");
      h->eigenvalues.push_back(std::stod(row[1]));
    }
    *out = h.release();
  });
}

void tdpod_basis_free(tdpod_basis* b) { delete b; }

int tdpod_basis_rank(const tdpod_basis* b) { return b ? b->r : 0; }

int tdpod_basis_numerical_rank(const tdpod_basis* b) { return b ? b->d_v : 0; }

size_t tdpod_basis_eigenvalues(const tdpod_basis* b, double* buf, size_t len) {
  if (!b || !buf) return 0;
  const size_t n = std::min(len, b->eigenvalues.size());
  std::copy_n(b->eigenvalues.begin(), n, buf);
  return n;
}

}  // extern "C"
