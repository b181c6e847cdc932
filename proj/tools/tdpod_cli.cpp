// Command-line front end. Talks to the library only through the C interface.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tdpod/tdpod.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Overrides {
  std::string config_file;
  std::string out;
  std::optional<int> nx, ny, levels, degree, r, newton_max_iter;
  std::optional<double> nu, mu, dt, final_time, tau, threshold, newton_tol, reference_dt;
  std::optional<std::string> integrator, problem, variant, x, kind;
  std::optional<unsigned long long> seed;
  std::vector<int> meshes;
  std::vector<double> dts;
  std::vector<std::string> variants;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_file, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("--nx", o.nx, "grid cells in x");
  cmd->add_option("--ny", o.ny, "grid cells in y");
  cmd->add_option("--levels", o.levels, "uniform refinements");
  cmd->add_option("--degree", o.degree, "velocity degree (2 or 3)");
  cmd->add_option("--nu", o.nu, "viscosity");
  cmd->add_option("--mu", o.mu, "grad-div parameter");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--T", o.final_time, "final time");
  cmd->add_option("--integrator", o.integrator, "bdf2 or implicit_euler");
  cmd->add_option("--problem", o.problem, "manufactured, zero or decaying");
  cmd->add_option("--variant", o.variant, "snapshot set variant");
  cmd->add_option("--tau", o.tau, "derivative scaling (default T)");
  cmd->add_option("--x", o.x, "POD inner product: L2 or H1");
  cmd->add_option("--r", o.r, "POD rank (0: threshold rule)");
  cmd->add_option("--threshold", o.threshold, "relative singular value cut");
  cmd->add_option("--seed", o.seed, "seed for randomized checks");
  cmd->add_option("--newton-tol", o.newton_tol, "FOM Newton tolerance");
  cmd->add_option("--newton-max-iter", o.newton_max_iter, "FOM Newton iteration limit");
}

template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

Json build_config(const Overrides& o) {
  Json j = Json::object();
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    j = Json::parse(ss.str());  // malformed files are reported by the caller
    if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
  }
  if (o.nx || o.ny || o.levels) {
    Json& m = j["mesh"];
    if (!m.is_object()) m = Json::object();
    put(m, "nx", o.nx);
    put(m, "ny", o.ny);
    put(m, "levels", o.levels);
  }
  put(j, "degree", o.degree);
  put(j, "nu", o.nu);
  put(j, "mu", o.mu);
  put(j, "dt", o.dt);
  put(j, "T", o.final_time);
  put(j, "integrator", o.integrator);
  put(j, "problem", o.problem);
  put(j, "variant", o.variant);
  put(j, "tau", o.tau);
  put(j, "x", o.x);
  put(j, "r", o.r);
  put(j, "threshold", o.threshold);
  put(j, "seed", o.seed);
  put(j, "newton_tol", o.newton_tol);
  put(j, "newton_max_iter", o.newton_max_iter);
  if (o.kind || o.reference_dt || !o.meshes.empty() || !o.dts.empty() || !o.variants.empty()) {
    Json& s = j["study"];
    if (!s.is_object()) s = Json::object();
    put(s, "kind", o.kind);
    put(s, "reference_dt", o.reference_dt);
    if (!o.meshes.empty()) s["meshes"] = o.meshes;
    if (!o.dts.empty()) s["dts"] = o.dts;
    if (!o.variants.empty()) s["variants"] = o.variants;
  }
  return j;
}

std::string output_dir(const Overrides& o, const Json& cfg, const std::string& name) {
  if (!o.out.empty()) return o.out;
  if (cfg.contains("output") && cfg["output"].is_string() && !cfg["output"].get<std::string>().empty())
    return cfg["output"].get<std::string>();
  const char* root = std::getenv("TDPOD_OUTPUT_ROOT");
  return std::string(root && *root ? root : "tdpod_out") + "/" + name;
}

int exit_code(tdpod_status s) {
  if (s == TDPOD_OK) return kExitOk;
  std::cerr << "error: " << tdpod_last_error() << "\n";
  return s == TDPOD_ERR_NUMERICAL ? kExitNumerical : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POD reduced-order modelling lab for 2D incompressible Navier-Stokes", "tdpod"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tdpod_version()));

  Overrides o;
  std::string traj_dir, basis_dir;
  bool strict = false;

  auto* fom = app.add_subcommand("fom", "full order model")->require_subcommand(1);
  auto* fom_run = fom->add_subcommand("run", "run the Taylor-Hood solver and store the trajectory");
  add_common(fom_run, o);

  auto* pod = app.add_subcommand("pod", "POD bases")->require_subcommand(1);
  auto* pod_build = pod->add_subcommand("build", "build a POD basis from a stored trajectory");
  add_common(pod_build, o);
  pod_build->add_option("--traj", traj_dir, "trajectory directory")->required()->check(CLI::ExistingDirectory);

  auto* rom = app.add_subcommand("rom", "reduced order model")->require_subcommand(1);
  auto* rom_run = rom->add_subcommand("run", "run the POD-ROM on a stored basis");
  add_common(rom_run, o);
  rom_run->add_option("--traj", traj_dir, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  rom_run->add_option("--basis", basis_dir, "basis directory")->required()->check(CLI::ExistingDirectory);

  auto* study = app.add_subcommand("study", "parameter studies")->require_subcommand(1);
  auto* conv = study->add_subcommand("convergence", "spatial or temporal convergence rates");
  add_common(conv, o);
  conv->add_option("--kind", o.kind, "space or time");
  conv->add_option("--meshes", o.meshes, "grid sizes for the spatial study")->delimiter(',');
  conv->add_option("--dts", o.dts, "time steps for the temporal study")->delimiter(',');
  conv->add_option("--reference-dt", o.reference_dt, "reference time step for the temporal study");
  auto* compare = study->add_subcommand("compare-sets", "compare snapshot set variants");
  add_common(compare, o);
  compare->add_option("--variants", o.variants, "variants to compare")->delimiter(',');

  auto* check = app.add_subcommand("check", "verification checks")->require_subcommand(1);
  auto* inv = check->add_subcommand("invariants", "identity, bound and stability checks");
  add_common(inv, o);
  inv->add_flag("--strict", strict, "exit with status 2 when a check fails");

  auto* report = app.add_subcommand("report", "constants and projection diagnostics");
  add_common(report, o);
  report->add_option("--traj", traj_dir, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--basis", basis_dir, "basis directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Json cfg;
  try {
    cfg = build_config(o);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot read config: " << e.what() << "\n";
    return kExitUsage;
  }
  const std::string cfg_text = cfg.dump();

  if (fom_run->parsed()) {
    const std::string out = output_dir(o, cfg, "fom");
    const int rc = exit_code(tdpod_fom_run(cfg_text.c_str(), out.c_str()));
    if (rc == kExitOk) std::cout << "trajectory written to " << out << "\n";
    return rc;
  }
  if (pod_build->parsed()) {
    const std::string out = output_dir(o, cfg, "basis");
    const int rc = exit_code(tdpod_pod_build(cfg_text.c_str(), traj_dir.c_str(), out.c_str()));
    if (rc == kExitOk) std::cout << "basis written to " << out << "\n";
    return rc;
  }
  if (rom_run->parsed()) {
    const std::string out = output_dir(o, cfg, "rom");
    const int rc = exit_code(tdpod_rom_run(cfg_text.c_str(), traj_dir.c_str(), basis_dir.c_str(), out.c_str()));
    if (rc == kExitOk) std::cout << "reduced trajectory written to " << out << "\n";
    return rc;
  }
  if (conv->parsed()) {
    const std::string out = output_dir(o, cfg, "convergence");
    const int rc = exit_code(tdpod_study_convergence(cfg_text.c_str(), out.c_str()));
    if (rc == kExitOk) std::cout << "rates written to " << out << "\n";
    return rc;
  }
  if (compare->parsed()) {
    const std::string out = output_dir(o, cfg, "compare_sets");
    const int rc = exit_code(tdpod_study_compare_sets(cfg_text.c_str(), out.c_str()));
    if (rc == kExitOk) std::cout << "comparison written to " << out << "\n";
    return rc;
  }
  if (inv->parsed()) {
    const std::string out = output_dir(o, cfg, "invariants");
    int failed = 0;
    const int rc = exit_code(tdpod_check_invariants(cfg_text.c_str(), out.c_str(), &failed));
    if (rc != kExitOk) return rc;
    std::cout << failed << " failed checks; report written to " << out << "/report.csv\n";
    return strict && failed > 0 ? kExitNumerical : kExitOk;
  }
  if (report->parsed()) {
    const std::string out = output_dir(o, cfg, "report");
    const int rc = exit_code(tdpod_report(cfg_text.c_str(), traj_dir.c_str(), basis_dir.c_str(), out.c_str()));
    if (rc == kExitOk) std::cout << "report written to " << out << "\n";
    return rc;
  }
  return kExitUsage;
}
