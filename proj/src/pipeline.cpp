#include "tdpod/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tdpod/error.hpp"

namespace fs = std::filesystem;

namespace tdpod {

namespace {

template <class T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail_input("config key '" + key + "' has the wrong type");
  }
}

std::vector<std::string> variant_names(const std::vector<SnapshotVariant>& vs) {
  std::vector<std::string> out;
  for (auto v : vs) out.push_back(to_string(v));
  return out;
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) { return from_json(j, RunConfig{}); }

RunConfig RunConfig::from_json(const Json& j, const RunConfig& base) {
  if (!j.is_object()) fail_input("config must be a JSON object");
  RunConfig c = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "mesh") {
      if (!value.is_object()) fail_input("config key 'mesh' must be an object");
      for (const auto& [mk, mv] : value.items()) {
        if (mk == "nx") c.nx = get_as<int>(mv, "mesh.nx");
        else if (mk == "ny") c.ny = get_as<int>(mv, "mesh.ny");
        else if (mk == "levels") c.levels = get_as<int>(mv, "mesh.levels");
        else fail_input("unknown config key 'mesh." + mk + "'");
      }
    } else if (key == "degree") c.degree = get_as<int>(value, key);
    else if (key == "nu") c.nu = get_as<double>(value, key);
    else if (key == "mu") c.mu = get_as<double>(value, key);
    else if (key == "dt") c.dt = get_as<double>(value, key);
    else if (key == "T") c.final_time = get_as<double>(value, key);
    else if (key == "integrator") c.integrator = parse_integrator(get_as<std::string>(value, key));
    else if (key == "problem") c.problem = get_as<std::string>(value, key);
    else if (key == "variant") c.variant = parse_variant(get_as<std::string>(value, key));
    else if (key == "tau") c.tau = value.is_null() ? std::nullopt : std::optional<double>(get_as<double>(value, key));
    else if (key == "x") c.x = parse_inner_product(get_as<std::string>(value, key));
    else if (key == "r") c.r = get_as<int>(value, key);
    else if (key == "threshold")
      c.threshold = value.is_null() ? std::nullopt : std::optional<double>(get_as<double>(value, key));
    else if (key == "output") c.output = get_as<std::string>(value, key);
    else if (key == "seed") c.seed = get_as<unsigned long long>(value, key);
    else if (key == "newton_tol") c.newton_tol = get_as<double>(value, key);
    else if (key == "newton_max_iter") c.newton_max_iter = get_as<int>(value, key);
    else if (key == "study") {
      if (!value.is_object()) fail_input("config key 'study' must be an object");
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "kind") c.study_kind = get_as<std::string>(sv, "study.kind");
        else if (sk == "meshes") c.meshes = get_as<std::vector<int>>(sv, "study.meshes");
        else if (sk == "dts") c.dts = get_as<std::vector<double>>(sv, "study.dts");
        else if (sk == "reference_dt") c.reference_dt = get_as<double>(sv, "study.reference_dt");
        else if (sk == "variants") {
          c.variants.clear();
          for (const auto& name : get_as<std::vector<std::string>>(sv, "study.variants"))
            c.variants.push_back(parse_variant(name));
        } else {
          fail_input("unknown config key 'study." + sk + "'");
        }
      }
    } else {
      fail_input("unknown config key '" + key + "'");
    }
  }
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["mesh"] = {{"nx", nx}, {"ny", ny}, {"levels", levels}};
  j["degree"] = degree;
  j["nu"] = nu;
  j["mu"] = mu;
  j["dt"] = dt;
  j["T"] = final_time;
  j["integrator"] = to_string(integrator);
  j["problem"] = problem;
  j["variant"] = to_string(variant);
  j["tau"] = tau ? Json(*tau) : Json(nullptr);
  j["x"] = to_string(x);
  j["r"] = r;
  j["threshold"] = threshold ? Json(*threshold) : Json(nullptr);
  j["output"] = output;
  j["seed"] = seed;
  j["newton_tol"] = newton_tol;
  j["newton_max_iter"] = newton_max_iter;
  j["study"] = {{"kind", study_kind},
                {"meshes", meshes},
                {"dts", dts},
                {"reference_dt", reference_dt},
                {"variants", variant_names(variants)}};
  return j;
}

void RunConfig::validate() const {
  if (nx < 1 || ny < 1) fail_input("mesh.nx and mesh.ny must be positive");
  if (levels < 0 || levels > 6) fail_input("mesh.levels must lie in [0, 6]");
  if (degree != 2 && degree != 3) fail_input("degree must be 2 or 3");
  fom_config().validate();
  (void)problem_by_name(problem, nu);
  if (tau && !(*tau > 0.0)) fail_input("tau must be positive");
  if (r < 0) fail_input("r must be non-negative");
  if (threshold && !(*threshold > 0.0 && *threshold < 1.0)) fail_input("threshold must lie in (0, 1)");
  if (study_kind != "space" && study_kind != "time") fail_input("study.kind must be 'space' or 'time'");
  if (meshes.empty()) fail_input("study.meshes must not be empty");
  for (std::size_t i = 0; i < meshes.size(); ++i)
    if (meshes[i] < 1 || (i > 0 && meshes[i] <= meshes[i - 1]))
      fail_input("study.meshes must be positive and increasing");
  if (dts.empty()) fail_input("study.dts must not be empty");
  for (std::size_t i = 0; i < dts.size(); ++i)
    if (!(dts[i] > 0.0) || (i > 0 && dts[i] >= dts[i - 1])) fail_input("study.dts must be positive and decreasing");
  if (!(reference_dt > 0.0)) fail_input("study.reference_dt must be positive");
  if (variants.empty()) fail_input("study.variants must not be empty");
}

RankRule RunConfig::rank_rule() const {
  if (r > 0) return RankRule::explicit_rank(r);
  return RankRule::relative_threshold(threshold ? *threshold : default_threshold(x));
}

FomConfig RunConfig::fom_config() const {
  FomConfig f;
  f.nu = nu;
  f.mu = mu;
  f.dt = dt;
  f.final_time = final_time;
  f.integrator = integrator;
  f.newton_tol = newton_tol;
  f.newton_max_iter = newton_max_iter;
  return f;
}

RomConfig RunConfig::rom_config() const {
  RomConfig rc;
  rc.dt = dt;
  rc.final_time = final_time;
  rc.integrator = integrator;
  return rc;
}

Discretization make_discretization(int nx, int ny, int levels, int degree) {
  Mesh mesh = build_rect_mesh(nx, ny);
  for (int l = 0; l < levels; ++l) mesh = refine_uniform(mesh);
  Discretization d;
  d.mesh = std::make_shared<const Mesh>(std::move(mesh));
  d.space = build_taylor_hood(d.mesh, degree);
  d.assembler = std::make_shared<const Assembler>(d.space);
  d.ops = d.assembler->bilinear_forms();
  return d;
}

Discretization make_discretization(const RunConfig& cfg) {
  return make_discretization(cfg.nx, cfg.ny, cfg.levels, cfg.degree);
}

PreparedSet prepare_snapshot_set(const Trajectory& traj, SnapshotVariant variant, double tau, bool center_on_mean) {
  PreparedSet p;
  if (variant == SnapshotVariant::Fluctuations) {
    p.set = build_snapshot_set(traj, variant, tau);
    p.offset = temporal_mean(traj.velocities);
  } else if (center_on_mean) {
    p.set = build_snapshot_set(fluctuation_trajectory(traj), variant, tau);
    p.offset = temporal_mean(traj.velocities);
  } else {
    p.set = build_snapshot_set(traj, variant, tau);
  }
  return p;
}

RomRun solve_rom(const FomSolver& fom, const PodBasis& basis, const InnerProduct& x, const Vector& u0,
                 const RomConfig& cfg, const Vector* offset) {
  RomRun run;
  run.ops = build_rom_operators(fom.assembler(), fom.operators(), basis, fom.config().nu, fom.config().mu, offset);
  const Eigen::VectorXd a0 = initial_coordinates(basis, x, u0, offset);
  run.reduced = run_rom(run.ops, make_reduced_load(fom, basis), a0, cfg);
  run.lifted = lift_trajectory(run.ops, basis, run.reduced);
  return run;
}

namespace {

void write_error_rows(CsvWriter& w, const std::string& variant, const std::string& x, const std::vector<double>& times,
                      const ErrorSeries& e) {
  for (std::size_t j = 0; j < times.size(); ++j) {
    w.cell(variant);
    w.cell(x);
    w.cell(j);
    w.cell(times[j]);
    w.cell(e.l2[j]);
    w.cell(e.h1[j]);
    w.end_row();
  }
}

const std::vector<std::string> kErrorHeader{"variant", "x", "j", "t", "err_L2", "err_H1"};

std::vector<Vector> projected_series(const std::vector<Vector>& us, const PodBasis& basis, const InnerProduct& x,
                                     int r, const Vector* offset) {
  std::vector<Vector> out;
  out.reserve(us.size());
  for (const auto& u : us) {
    if (offset) out.push_back(*offset + project_onto_basis(basis, x, u - *offset, r).lifted);
    else out.push_back(project_onto_basis(basis, x, u, r).lifted);
  }
  return out;
}

RunConfig merged_config(const Json& user, const std::vector<Json>& layers) {
  RunConfig c;
  for (const auto& layer : layers) c = RunConfig::from_json(layer, c);
  c = RunConfig::from_json(user, c);
  c.validate();
  return c;
}

void check_space(const Discretization& d, const Vector& v, const std::string& what) {
  if (v.size() != d.ops.mass.rows())
    fail_input(what + " has " + std::to_string(v.size()) + " velocity DOFs, the configured discretization has " +
               std::to_string(d.ops.mass.rows()));
}

}  // namespace

void command_fom_run(const Json& config, const fs::path& outdir) {
  const RunConfig cfg = merged_config(config, {});
  const Discretization d = make_discretization(cfg);
  const FlowProblem problem = problem_by_name(cfg.problem, cfg.nu);
  const FomSolver fom(d.assembler, cfg.fom_config(), problem);
  const Trajectory traj = fom.run();
  save_trajectory(traj, outdir, cfg.to_json());
  write_mesh_csv(*d.mesh, outdir / "mesh");
  if (problem.exact) {
    CsvWriter w(outdir / "errors.csv", {"j", "t", "err_L2", "err_H1"});
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
      w.cell(j);
      w.cell(traj.times[j]);
      w.cell(d.assembler->l2_error(traj.velocities[j], problem.exact, traj.times[j]));
      w.cell(d.assembler->h1_seminorm_error(traj.velocities[j], problem.exact, traj.times[j]));
      w.end_row();
    }
  }
}

void command_pod_build(const Json& config, const fs::path& traj_dir, const fs::path& outdir) {
  Json traj_cfg;
  const Trajectory traj = load_trajectory(traj_dir, &traj_cfg);
  const RunConfig cfg = merged_config(config, {traj_cfg});
  const Discretization d = make_discretization(cfg);
  check_space(d, traj.velocities.front(), "trajectory");
  const InnerProduct x = make_inner_product(cfg.x, d.ops);
  const PreparedSet prep = prepare_snapshot_set(traj, cfg.variant, cfg.effective_tau(), false);
  const PodBasis full = compute_pod_basis(prep.set, x, d.ops, RankRule::full());
  const PodBasis basis = compute_pod_basis(prep.set, x, d.ops, cfg.rank_rule());
  save_basis(basis, outdir, cfg.to_json());
  if (prep.offset) save_vector_binary(*prep.offset, outdir / "offset.bin");
  CsvWriter w(outdir / "singular_values.csv", {"variant", "x", "k", "sigma_k", "sigma_rel"});
  append_singular_values(w, full);
}

void command_rom_run(const Json& config, const fs::path& traj_dir, const fs::path& basis_dir, const fs::path& outdir) {
  Json traj_cfg, basis_cfg;
  const Trajectory traj = load_trajectory(traj_dir, &traj_cfg);
  const Json basis_meta = read_json(basis_dir / "meta.json");
  basis_cfg = basis_meta.value("config", Json::object());
  // The basis rank comes from the basis directory unless overridden here.
  basis_cfg.erase("r");
  const RunConfig cfg = merged_config(config, {traj_cfg, basis_cfg});
  const Discretization d = make_discretization(cfg);
  check_space(d, traj.velocities.front(), "trajectory");
  PodBasis basis = load_basis(basis_dir, d.ops);
  if (cfg.r > basis.r) fail_input("requested r exceeds the stored basis size " + std::to_string(basis.r));
  if (cfg.r > 0) basis = truncate(basis, cfg.r, d.ops);
  std::optional<Vector> offset;
  if (fs::exists(basis_dir / "offset.bin")) offset = load_vector_binary(basis_dir / "offset.bin");

  const InnerProduct x = make_inner_product(basis.tag, d.ops);
  const FomSolver fom(d.assembler, cfg.fom_config(), problem_by_name(cfg.problem, cfg.nu));
  const RomRun run = solve_rom(fom, basis, x, traj.velocities.front(), cfg.rom_config(), offset ? &*offset : nullptr);

  write_reduced_trajectory_csv(run.reduced, outdir / "reduced.csv");
  Trajectory lifted;
  lifted.dt = run.reduced.dt;
  lifted.times = run.reduced.times;
  lifted.velocities = run.lifted;
  save_trajectory(lifted, outdir / "lifted", cfg.to_json());

  bool same_grid = traj.times.size() == lifted.times.size();
  for (std::size_t j = 0; same_grid && j < traj.times.size(); ++j)
    same_grid = std::abs(traj.times[j] - lifted.times[j]) <= 1e-12 * std::max(1.0, traj.times[j]);
  if (same_grid) {
    const ErrorSeries e = compute_error_norms(run.lifted, traj.velocities, d.ops, traj.dt);
    CsvWriter w(outdir / "rom_errors.csv", kErrorHeader);
    write_error_rows(w, basis.variant, to_string(basis.tag), traj.times, e);
  }
}

ConvergenceStudy run_convergence_study(const RunConfig& cfg) {
  cfg.validate();
  ConvergenceStudy st;
  st.kind = cfg.study_kind;
  const FlowProblem problem = problem_by_name(cfg.problem, cfg.nu);
  if (cfg.study_kind == "space") {
    if (!problem.exact) fail_input("spatial convergence needs a problem with an exact solution");
    int level = 0;
    for (int n : cfg.meshes) {
      const Discretization d = make_discretization(n, n, cfg.levels, cfg.degree);
      const FomSolver fom(d.assembler, cfg.fom_config(), problem);
      const Trajectory traj = fom.run();
      const double t = traj.final_time();
      st.fom.push_back({level++, 1.0 / (n * (1 << cfg.levels)),
                        d.assembler->l2_error(traj.velocities.back(), problem.exact, t),
                        d.assembler->h1_seminorm_error(traj.velocities.back(), problem.exact, t)});
    }
    return st;
  }

  for (double dt : cfg.dts) {
    const double ratio = dt / cfg.reference_dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 2.0)
      fail_input("study.dts must be integer multiples (at least 2x) of study.reference_dt");
  }
  const Discretization d = make_discretization(cfg);
  FomConfig ref_cfg = cfg.fom_config();
  ref_cfg.dt = cfg.reference_dt;
  const FomSolver ref_fom(d.assembler, ref_cfg, problem);
  const Trajectory ref = ref_fom.run();

  const InnerProduct x = make_inner_product(cfg.x, d.ops);
  const PreparedSet prep = prepare_snapshot_set(ref, cfg.variant, cfg.effective_tau(), false);
  const PodBasis basis = compute_pod_basis(prep.set, x, d.ops, cfg.rank_rule());
  st.rom_rank = basis.r;
  const Vector* offset = prep.offset ? &*prep.offset : nullptr;
  RomConfig rc = cfg.rom_config();
  rc.dt = cfg.reference_dt;
  const RomRun ref_rom = solve_rom(ref_fom, basis, x, ref.velocities.front(), rc, offset);

  int level = 0;
  for (double dt : cfg.dts) {
    FomConfig fc = cfg.fom_config();
    fc.dt = dt;
    const FomSolver fom(d.assembler, fc, problem);
    const Trajectory traj = fom.run();
    rc.dt = dt;
    const RomRun rom = solve_rom(fom, basis, x, traj.velocities.front(), rc, offset);
    // Final-time errors: the first few steps carry a fast, grid-scale
    // transient (the projected initial state is not on the discrete slow
    // manifold) that no step size in range resolves, so a maximum over all
    // times would measure that layer rather than the scheme's order.
    const Vector ef = traj.velocities.back() - ref.velocities.back();
    const Vector er = rom.lifted.back() - ref_rom.lifted.back();
    st.fom.push_back({level, dt, std::sqrt(ef.dot(d.ops.mass * ef)), std::sqrt(ef.dot(d.ops.stiffness * ef))});
    st.rom.push_back({level, dt, std::sqrt(er.dot(d.ops.mass * er)), std::sqrt(er.dot(d.ops.stiffness * er))});
    ++level;
  }
  return st;
}

void command_study_convergence(const Json& config, const fs::path& outdir) {
  const RunConfig cfg = merged_config(config, {});
  const ConvergenceStudy st = run_convergence_study(cfg);
  write_rates_csv(st.fom, outdir / "rates.csv");
  if (!st.rom.empty()) write_rates_csv(st.rom, outdir / "rom_rates.csv");
  Json meta = cfg.to_json();
  meta["rom_rank"] = st.rom_rank;
  write_json(meta, outdir / "study.json");
}

CompareSetsResult run_compare_sets(const RunConfig& cfg) {
  cfg.validate();
  const Discretization d = make_discretization(cfg);
  const FomSolver fom(d.assembler, cfg.fom_config(), problem_by_name(cfg.problem, cfg.nu));
  CompareSetsResult res;
  res.trajectory = fom.run();
  const Trajectory& traj = res.trajectory;

  for (InnerProductTag tag : {InnerProductTag::L2, InnerProductTag::H1}) {
    const InnerProduct x = make_inner_product(tag, d.ops);
    std::vector<PreparedSet> sets;
    std::vector<CompareEntry> entries;
    int common_r = 0;
    for (SnapshotVariant v : cfg.variants) {
      sets.push_back(prepare_snapshot_set(traj, v, cfg.effective_tau(), true));
      CompareEntry e;
      e.variant = v;
      e.x = tag;
      e.basis = compute_pod_basis(sets.back().set, x, d.ops, RankRule::full());
      int rank = 0;
      if (cfg.r > 0) {
        rank = std::min(cfg.r, e.basis.d_v);
      } else {
        const double cut = cfg.threshold ? *cfg.threshold : default_threshold(tag);
        const Eigen::VectorXd rel = e.basis.relative_singular_values();
        while (rank < e.basis.d_v && rel[rank] >= cut) ++rank;
        rank = std::max(rank, 1);
      }
      common_r = common_r == 0 ? rank : std::min(common_r, rank);
      entries.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CompareEntry& e = entries[i];
      e.r = common_r;
      const PodBasis basis = truncate(e.basis, common_r, d.ops);
      const Vector* offset = sets[i].offset ? &*sets[i].offset : nullptr;
      e.projection =
          compute_error_norms(projected_series(traj.velocities, basis, x, common_r, offset), traj.velocities, d.ops,
                              traj.dt);
      const RomRun rom = solve_rom(fom, basis, x, traj.velocities.front(), cfg.rom_config(), offset);
      e.rom = compute_error_norms(rom.lifted, traj.velocities, d.ops, traj.dt);
      res.entries.push_back(std::move(e));
    }
  }
  return res;
}

void command_study_compare_sets(const Json& config, const fs::path& outdir) {
  const RunConfig cfg = merged_config(config, {});
  const CompareSetsResult res = run_compare_sets(cfg);
  const auto& times = res.trajectory.times;
  {
    CsvWriter w(outdir / "singular_values.csv", {"variant", "x", "k", "sigma_k", "sigma_rel"});
    for (const auto& e : res.entries) append_singular_values(w, e.basis);
  }
  {
    CsvWriter w(outdir / "projection_errors.csv", kErrorHeader);
    for (const auto& e : res.entries) write_error_rows(w, to_string(e.variant), to_string(e.x), times, e.projection);
  }
  {
    CsvWriter w(outdir / "rom_errors.csv", kErrorHeader);
    for (const auto& e : res.entries) write_error_rows(w, to_string(e.variant), to_string(e.x), times, e.rom);
  }
  CsvWriter w(outdir / "summary.csv", {"variant", "x", "d_v", "r", "max_proj_L2", "max_proj_H1", "max_rom_L2",
                                       "max_rom_H1", "acc_rom_L2", "acc_rom_H1"});
  for (const auto& e : res.entries) {
    w.cell(to_string(e.variant));
    w.cell(to_string(e.x));
    w.cell(e.basis.d_v);
    w.cell(e.r);
    w.cell(e.projection.max_l2());
    w.cell(e.projection.max_h1());
    w.cell(e.rom.max_l2());
    w.cell(e.rom.max_h1());
    w.cell(e.rom.accumulated_l2);
    w.cell(e.rom.accumulated_h1);
    w.end_row();
  }
}

namespace {

void add_bound_checks(std::vector<CheckRecord>& out, const Trajectory& traj, const PodBasis& basis,
                      const InnerProduct& x, BoundAnchor anchor, int r) {
  const ProjectionResiduals z = projection_residuals(traj, basis, x, r);
  const BoundCheck c = pointwise_bound_check(z.z, z.z_t, *x.op, traj.dt, anchor);
  out.push_back({"pointwise_" + to_string(anchor) + ":" + to_string(x.tag) + ":r" + std::to_string(r), -1, c.lhs,
                 c.rhs, c.margin, c.pass});
}

}  // namespace

std::vector<CheckRecord> run_invariant_checks(const RunConfig& cfg, ConstantsReport* constants) {
  cfg.validate();
  const Discretization d = make_discretization(cfg);
  const FomSolver fom(d.assembler, cfg.fom_config(), problem_by_name(cfg.problem, cfg.nu));
  const Trajectory traj = fom.run();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<CheckRecord> out;

  const std::vector<int> bound_ranks{2, 4, 8};
  for (InnerProductTag tag : {InnerProductTag::L2, InnerProductTag::H1}) {
    const InnerProduct x = make_inner_product(tag, d.ops);
    const std::string xs = to_string(tag);

    for (SnapshotVariant v : {SnapshotVariant::InitialPlusDerivatives, SnapshotVariant::MeanPlusDerivatives,
                              SnapshotVariant::Fluctuations, SnapshotVariant::DifferenceQuotients,
                              SnapshotVariant::RawVelocities}) {
      const SnapshotSet set = build_snapshot_set(traj, v, cfg.effective_tau());
      const PodBasis basis = compute_pod_basis(set, x, d.ops, RankRule::full());
      const std::string id = to_string(v) + ":" + xs;
      const double trace = basis.trace();
      for (int r = 1; r <= basis.d_v; ++r) {
        const double lhs = mean_square_projection_error(set, basis, x, r);
        const double rhs = basis.tail(r);
        const double margin = rhs - lhs;
        out.push_back({"tail_identity:" + id, r, lhs, rhs, margin, std::abs(margin) <= 1e-8 * trace});
      }
      const GramReport g = pod_gram_matrices(basis);
      const Eigen::MatrixXd& gx = tag == InnerProductTag::L2 ? g.mass : g.stiffness;
      const double dev = (gx - Eigen::MatrixXd::Identity(basis.r, basis.r)).cwiseAbs().maxCoeff();
      out.push_back({"orthonormality:" + id, -1, dev, 1e-8, 1e-8 - dev, dev < 1e-8});
    }

    const SnapshotSet init_set = build_snapshot_set(traj, SnapshotVariant::InitialPlusDerivatives, cfg.effective_tau());
    const PodBasis init_basis = compute_pod_basis(init_set, x, d.ops, RankRule::full());
    const SnapshotSet mean_set = build_snapshot_set(traj, SnapshotVariant::MeanPlusDerivatives, cfg.effective_tau());
    const PodBasis mean_basis = compute_pod_basis(mean_set, x, d.ops, RankRule::full());

    // Inverse inequalities on random members of the span.
    {
      const GramReport g = pod_gram_matrices(init_basis);
      double worst = 1.0;
      CheckRecord rec{std::string(tag == InnerProductTag::L2 ? "inverse_stiffness:" : "inverse_mass:") + xs, -1};
      for (int s = 0; s < 200; ++s) {
        Eigen::VectorXd a(init_basis.r);
        for (int k = 0; k < init_basis.r; ++k) a[k] = normal(rng);
        const Vector v = lift(init_basis, a);
        const double grad2 = v.dot(d.ops.stiffness * v);
        const double l22 = v.dot(d.ops.mass * v);
        const double bound = (tag == InnerProductTag::L2 ? g.stiffness_norm : g.inv_mass_norm) * l22;
        const double slack = (bound - grad2) / bound;
        if (s == 0 || slack < worst) {
          worst = slack;
          rec.lhs = grad2;
          rec.rhs = bound;
          rec.margin = bound - grad2;
          rec.pass = rec.margin >= 0.0;
        }
      }
      out.push_back(rec);
    }

    for (int r : bound_ranks) {
      if (r > init_basis.d_v || r > mean_basis.d_v) continue;
      add_bound_checks(out, traj, init_basis, x, BoundAnchor::Initial, r);
      add_bound_checks(out, traj, mean_basis, x, BoundAnchor::Mean, r);
      const TailBound tb = tail_consistency_check(traj, init_basis, x, r);
      const std::string rid = xs + ":r" + std::to_string(r);
      out.push_back({"tail_bound_max:" + rid, -1, tb.max_error, tb.bound, tb.bound - tb.max_error, tb.pass_max});
      out.push_back({"tail_bound_mean:" + rid, -1, tb.mean_error, tb.bound, tb.bound - tb.mean_error, tb.pass_mean});
    }

    // Reduced tensor skew-symmetry and one unforced implicit Euler step.
    const int rr = std::min(init_basis.r, 8);
    const PodBasis small = truncate(init_basis, rr, d.ops);
    const RomOperators rom = build_rom_operators(*d.assembler, d.ops, small, cfg.nu, cfg.mu);
    Eigen::VectorXd a(rr), b(rr);
    for (int k = 0; k < rr; ++k) {
      a[k] = normal(rng);
      b[k] = normal(rng);
    }
    double contraction = 0.0, scale = 0.0;
    for (int i = 0; i < rr; ++i)
      for (int j = 0; j < rr; ++j)
        for (int k = 0; k < rr; ++k) {
          const double term = a[j] * b[i] * b[k] * rom.t(i, j, k);
          contraction += term;
          scale += std::abs(term);
        }
    const double skew_tol = 1e-10 * std::max(1.0, scale);
    out.push_back({"rom_skew:" + xs, -1, std::abs(contraction), skew_tol, skew_tol - std::abs(contraction),
                   std::abs(contraction) <= skew_tol});
    const RomStepResult step = rom_step(rom, a, nullptr, cfg.dt, Eigen::VectorXd::Zero(rr));
    const double before = mass_norm(rom, a), after = mass_norm(rom, step.coords);
    out.push_back({"rom_energy:" + xs, 1, after, before, before - after, after <= before * (1.0 + 1e-12)});

    if (tag == cfg.x) {
      const ConstantsReport c = constants_report(*d.assembler, traj, init_basis, x, cfg.mu);
      out.push_back({std::string(kWarningPrefix) + "time_condition", -1, c.time_condition, 0.5,
                     0.5 - c.time_condition, c.time_condition_ok});
      if (constants) *constants = c;
    }
  }
  return out;
}

namespace {

Json constants_json(const ConstantsReport& c) {
  return {{"C_inf", c.c_inf},   {"C_1inf", c.c_1inf}, {"C_ld", c.c_ld},
          {"K_inf", c.k_inf},   {"K_1inf", c.k_1inf}, {"C_u", c.c_u},
          {"time_condition", c.time_condition},       {"time_condition_ok", c.time_condition_ok},
          {"sup_norm_surrogate", "nodal maxima for velocities, quadrature-point maxima for gradients"}};
}

}  // namespace

int command_check_invariants(const Json& config, const fs::path& outdir) {
  const RunConfig cfg = merged_config(config, {});
  ConstantsReport c;
  const auto rows = run_invariant_checks(cfg, &c);
  write_report_csv(rows, outdir / "report.csv");
  write_json(constants_json(c), outdir / "constants.json");
  int failed = 0;
  for (const auto& r : rows)
    if (!r.pass && r.check_id.rfind(kWarningPrefix, 0) != 0) ++failed;
  return failed;
}

void command_report(const Json& config, const fs::path& traj_dir, const fs::path& basis_dir, const fs::path& outdir) {
  Json traj_cfg;
  const Trajectory traj = load_trajectory(traj_dir, &traj_cfg);
  Json basis_cfg = read_json(basis_dir / "meta.json").value("config", Json::object());
  basis_cfg.erase("r");
  const RunConfig cfg = merged_config(config, {traj_cfg, basis_cfg});
  const Discretization d = make_discretization(cfg);
  check_space(d, traj.velocities.front(), "trajectory");
  const PodBasis basis = load_basis(basis_dir, d.ops);
  std::optional<Vector> offset;
  if (fs::exists(basis_dir / "offset.bin")) offset = load_vector_binary(basis_dir / "offset.bin");
  const InnerProduct x = make_inner_product(basis.tag, d.ops);

  const ErrorSeries proj = compute_error_norms(
      projected_series(traj.velocities, basis, x, basis.r, offset ? &*offset : nullptr), traj.velocities, d.ops,
      traj.dt);
  {
    CsvWriter w(outdir / "projection_errors.csv", kErrorHeader);
    write_error_rows(w, basis.variant, to_string(basis.tag), traj.times, proj);
  }

  std::vector<CheckRecord> rows;
  if (traj.steps() >= 2 && !traj.derivatives.empty() && !offset) {
    for (BoundAnchor anchor : {BoundAnchor::Initial, BoundAnchor::Mean})
      add_bound_checks(rows, traj, basis, x, anchor, basis.r);
    const TailBound tb = tail_consistency_check(traj, basis, x, basis.r);
    rows.push_back({"tail_bound_max:" + to_string(basis.tag), -1, tb.max_error, tb.bound, tb.bound - tb.max_error,
                    tb.pass_max});
    rows.push_back({"tail_bound_mean:" + to_string(basis.tag), -1, tb.mean_error, tb.bound,
                    tb.bound - tb.mean_error, tb.pass_mean});
  }
  const ConstantsReport c = constants_report(*d.assembler, traj, basis, x, cfg.mu);
  rows.push_back({std::string(kWarningPrefix) + "time_condition", -1, c.time_condition, 0.5, 0.5 - c.time_condition,
                  c.time_condition_ok});
  write_report_csv(rows, outdir / "report.csv");

  Json j = constants_json(c);
  if (traj.steps() >= 2) {
    const SecondDerivativeIntegrals s = second_derivative_integrals(traj, d.ops);
    j["int_utt_L2"] = s.l2;
    j["int_utt_H1"] = s.h1;
  }
  j["tail"] = basis.tail(basis.r);
  j["max_projection_error_L2"] = proj.max_l2();
  j["max_projection_error_H1"] = proj.max_h1();
  write_json(j, outdir / "constants.json");
}

}  // namespace tdpod
