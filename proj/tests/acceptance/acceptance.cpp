// Acceptance suite: one PASS/FAIL line per primary criterion, tolerances
// pinned below. Exit status is the number of failed criteria, or with
// --expect-fail whether the failed set matches the listed one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tdpod/pipeline.hpp"

using namespace tdpod;

namespace {

// Pinned tolerances.
constexpr double kTailRel = 1e-8;          // 1
constexpr double kOrthoTol = 1e-8;         // 2
constexpr int kInverseSamples = 200;       // 3
constexpr double kLemmaTol = 1e-8;         // 4
constexpr double kSpaceRateL2 = 2.0;       // 5
constexpr double kSpaceRateH1 = 1.7;       // 5
constexpr double kRobustFactor = 5.0;      // 5
constexpr double kFullRankRel = 1e-6;      // 6
constexpr double kDecayConstant = 100.0;   // 7
constexpr double kEnergySlack = 1e-12;     // 8
constexpr double kTimeRateLo = 1.7;        // 9
constexpr double kTimeRateHi = 2.3;        // 9
constexpr double kCompareFactor = 3.0;     // 10

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const std::vector<SnapshotVariant> kVariants{SnapshotVariant::InitialPlusDerivatives,
                                             SnapshotVariant::MeanPlusDerivatives, SnapshotVariant::Fluctuations,
                                             SnapshotVariant::DifferenceQuotients, SnapshotVariant::RawVelocities};
const InnerProductTag kTags[] = {InnerProductTag::L2, InnerProductTag::H1};

// Manufactured run shared by criteria 1-4 and 7: 16x16 mesh, l = 2, BDF2, T = 1, M = 64.
struct Reference {
  RunConfig cfg;
  Discretization d;
  std::unique_ptr<FomSolver> fom;
  Trajectory traj;
  Reference() {
    cfg.nx = cfg.ny = 16;
    cfg.dt = 1.0 / 64;
    cfg.final_time = 1.0;
    d = make_discretization(cfg);
    fom = std::make_unique<FomSolver>(d.assembler, cfg.fom_config(), manufactured_problem(cfg.nu));
    traj = fom->run();
  }
  PodBasis basis(SnapshotVariant v, InnerProductTag tag) const {
    return compute_pod_basis(build_snapshot_set(traj, v, cfg.final_time), make_inner_product(tag, d.ops), d.ops,
                             RankRule::full());
  }
};

const Reference& reference() {
  static const Reference r;
  return r;
}

Outcome tail_identity() {
  const Reference& ref = reference();
  double worst = 0.0;
  int cases = 0;
  for (auto v : kVariants)
    for (auto tag : kTags) {
      const InnerProduct x = make_inner_product(tag, ref.d.ops);
      const SnapshotSet set = build_snapshot_set(ref.traj, v, ref.cfg.final_time);
      const PodBasis b = compute_pod_basis(set, x, ref.d.ops, RankRule::full());
      for (int r = 1; r <= b.d_v; ++r) {
        const double direct = mean_square_projection_error(set, b, x, r);
        worst = std::max(worst, std::abs(direct - b.tail(r)) / b.trace());
        ++cases;
      }
    }
  return {worst <= kTailRel, std::to_string(cases) + " (variant, X, r) cases, worst |err - tail|/trace = " +
                                 fmt(worst) + " (tol " + fmt(kTailRel) + ")"};
}

Outcome orthonormality() {
  const Reference& ref = reference();
  double worst_x = 0.0, worst_gram = 0.0;
  for (auto v : kVariants)
    for (auto tag : kTags) {
      const InnerProduct x = make_inner_product(tag, ref.d.ops);
      const PodBasis b = ref.basis(v, tag);
      for (int i = 0; i < b.r; ++i)
        for (int j = 0; j < b.r; ++j)
          worst_x = std::max(worst_x, std::abs(x(b.modes[i], b.modes[j]) - (i == j ? 1.0 : 0.0)));
      const GramReport g = pod_gram_matrices(b);
      const Eigen::MatrixXd& unit = tag == InnerProductTag::L2 ? g.mass : g.stiffness;
      worst_gram = std::max(worst_gram, (unit - Eigen::MatrixXd::Identity(b.r, b.r)).cwiseAbs().maxCoeff());
    }
  return {worst_x < kOrthoTol && worst_gram < kOrthoTol,
          "max |(phi_i,phi_j)_X - delta_ij| = " + fmt(worst_x) + ", max |Gram - I| = " + fmt(worst_gram)};
}

Outcome inverse_inequalities() {
  const Reference& ref = reference();
  std::mt19937_64 rng(ref.cfg.seed);
  std::normal_distribution<double> normal;
  double worst = 1e300;
  int samples = 0;
  for (auto v : kVariants)
    for (auto tag : kTags) {
      const PodBasis full = ref.basis(v, tag);
      for (int r : {2, 4, 8}) {
        if (r > full.r) continue;
        const PodBasis b = truncate(full, r, ref.d.ops);
        const GramReport g = pod_gram_matrices(b);
        // X = L2 pairs with ||S^v||_2, X = H1 with ||(M^v)^{-1}||_2.
        const double c = tag == InnerProductTag::L2 ? g.stiffness_norm : g.inv_mass_norm;
        for (int s = 0; s < kInverseSamples; ++s) {
          Eigen::VectorXd a(r);
          for (auto& e : a) e = normal(rng);
          const Vector u = lift(b, a);
          const double grad = std::sqrt(u.dot(ref.d.ops.stiffness * u));
          const double l2 = std::sqrt(u.dot(ref.d.ops.mass * u));
          worst = std::min(worst, (std::sqrt(c) * l2 - grad) / grad);
          ++samples;
        }
      }
    }
  return {worst >= 0.0, std::to_string(samples) + " samples (" + std::to_string(kInverseSamples) +
                            " per basis), min relative slack = " + fmt(worst)};
}

Outcome pointwise_lemmas() {
  const Reference& ref = reference();
  double worst = 1e300;
  int cases = 0;
  bool pass = true;
  for (auto tag : kTags) {
    const InnerProduct x = make_inner_product(tag, ref.d.ops);
    for (auto anchor : {BoundAnchor::Initial, BoundAnchor::Mean}) {
      const PodBasis b = ref.basis(
          anchor == BoundAnchor::Initial ? SnapshotVariant::InitialPlusDerivatives : SnapshotVariant::MeanPlusDerivatives,
          tag);
      for (int r : {2, 4, 8}) {
        const ProjectionResiduals z = projection_residuals(ref.traj, b, x, r);
        const BoundCheck c = pointwise_bound_check(z.z, z.z_t, *x.op, ref.traj.dt, anchor, kLemmaTol);
        pass = pass && c.pass;
        worst = std::min(worst, c.margin / c.rhs);
        ++cases;
      }
    }
  }
  return {pass, std::to_string(cases) + " cases, min margin/rhs = " + fmt(worst) + " (need >= -" + fmt(kLemmaTol) +
                    ")"};
}

Outcome spatial_convergence() {
  RunConfig cfg;
  cfg.study_kind = "space";
  cfg.meshes = {8, 16, 32};
  cfg.dt = 1e-3;
  cfg.final_time = 0.5;
  cfg.nu = 1e-2;
  cfg.mu = 0.01;
  cfg.integrator = Integrator::Bdf2;
  const ConvergenceStudy st = run_convergence_study(cfg);
  std::vector<double> h, el2, eh1;
  for (const auto& r : st.fom) h.push_back(r.spacing), el2.push_back(r.error_l2), eh1.push_back(r.error_h1);
  const auto rl2 = convergence_rates(el2, h), rh1 = convergence_rates(eh1, h);
  bool pass = true;
  std::ostringstream os;
  os << "L2 errors";
  for (double e : el2) os << ' ' << fmt(e);
  os << ", L2 rates";
  for (const auto& r : rl2) os << ' ' << fmt(r.value), pass = pass && !r.saturated && r.value >= kSpaceRateL2;
  os << ", H1 rates";
  for (const auto& r : rh1) os << ' ' << fmt(r.value), pass = pass && !r.saturated && r.value >= kSpaceRateH1;

  cfg.meshes = {16};
  cfg.nu = 1e-6;
  const double e_low = run_convergence_study(cfg).fom.front().error_l2;
  const double factor = std::max(e_low / el2[1], el2[1] / e_low);
  pass = pass && factor < kRobustFactor;
  os << "; nu=1e-6 on 16-mesh: L2 " << fmt(e_low) << " (factor " << fmt(factor) << ")";
  return {pass, os.str()};
}

Outcome full_rank_consistency() {
  RunConfig cfg;
  cfg.nx = cfg.ny = 8;
  cfg.dt = 1.0 / 32;
  cfg.final_time = 0.5;
  cfg.integrator = Integrator::ImplicitEuler;
  cfg.newton_tol = 1e-11;
  const Discretization d = make_discretization(cfg);
  const FomSolver fom(d.assembler, cfg.fom_config(), manufactured_problem(cfg.nu));
  const Trajectory traj = fom.run();
  const InnerProduct x = make_inner_product(InnerProductTag::L2, d.ops);
  const PodBasis b = compute_pod_basis(build_snapshot_set(traj, SnapshotVariant::InitialPlusDerivatives, 1.0), x,
                                       d.ops, RankRule::full());
  RomConfig rc = cfg.rom_config();
  const RomRun rom = solve_rom(fom, b, x, traj.velocities.front(), rc);
  double diff = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < traj.velocities.size(); ++j) {
    const Vector e = rom.lifted[j] - project_onto_basis(b, x, traj.velocities[j]).lifted;
    diff = std::max(diff, std::sqrt(e.dot(d.ops.mass * e)));
    scale = std::max(scale, std::sqrt(traj.velocities[j].dot(d.ops.mass * traj.velocities[j])));
  }
  return {diff < kFullRankRel * scale, "r = d_v = " + std::to_string(b.r) + ", max_j ||u_r - P u_h||_0 = " +
                                           fmt(diff) + ", bound " + fmt(kFullRankRel * scale)};
}

Outcome rom_error_decay() {
  const Reference& ref = reference();
  const InnerProduct x = make_inner_product(InnerProductTag::H1, ref.d.ops);
  const PodBasis full = ref.basis(SnapshotVariant::InitialPlusDerivatives, InnerProductTag::H1);
  const double t_final = ref.traj.final_time(), dt = ref.traj.dt;
  const double tau_ratio = t_final / full.tau;
  const double dt_term = t_final * 16.0 * t_final / 3.0 * dt * dt * second_derivative_integrals(ref.traj, ref.d.ops).h1;
  std::vector<int> ranks;
  for (int r = 2; r < full.d_v; r += 2) ranks.push_back(r);
  ranks.push_back(full.d_v);
  std::vector<double> errs;
  double worst_ratio = 0.0;
  for (int r : ranks) {
    const PodBasis b = truncate(full, r, ref.d.ops);
    const RomRun rom = solve_rom(*ref.fom, b, x, ref.traj.velocities.front(), ref.cfg.rom_config());
    const ErrorSeries e = compute_error_norms(rom.lifted, ref.traj.velocities, ref.d.ops, dt);
    errs.push_back(e.accumulated_l2);
    const double bound = t_final * (3.0 + 6.0 * tau_ratio * tau_ratio) * full.tail(r) + dt_term;
    worst_ratio = std::max(worst_ratio, e.accumulated_l2 / bound);
  }
  // The floor is where the sweep stops improving: ten times the smallest error seen.
  const double floor = 10.0 * *std::min_element(errs.begin(), errs.end());
  bool monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && (errs[i] <= errs[i - 1] || errs[i] <= floor);
  std::ostringstream os;
  os << "r = 2.." << full.d_v << " (" << ranks.size() << " ranks), accumulated L2 error " << fmt(errs.front())
     << " -> " << fmt(errs.back()) << ", monotone to floor " << (monotone ? "yes" : "no")
     << ", max error/(tail + dt^2 term) = " << fmt(worst_ratio) << " (limit " << fmt(kDecayConstant) << ")";
  return {monotone && worst_ratio <= kDecayConstant, os.str()};
}

Outcome energy_stability() {
  RunConfig cfg;
  cfg.nx = cfg.ny = 8;
  cfg.dt = 1.0 / 64;
  cfg.final_time = 0.5;
  cfg.integrator = Integrator::ImplicitEuler;
  cfg.problem = "decaying";
  const Discretization d = make_discretization(cfg);
  const FomSolver fom(d.assembler, cfg.fom_config(), decaying_problem());
  const Trajectory traj = fom.run();
  auto l2 = [&](const Vector& u) { return std::sqrt(u.dot(d.ops.mass * u)); };
  int violations = 0, runs = 0;
  double worst = -1e300;
  auto scan = [&](const std::vector<Vector>& us) {
    const double scale = l2(us.front());
    for (std::size_t j = 1; j < us.size(); ++j) {
      const double growth = l2(us[j]) - l2(us[j - 1]);
      worst = std::max(worst, growth / scale);
      if (growth > kEnergySlack * scale) ++violations;
    }
  };
  scan(traj.velocities);
  for (auto tag : kTags) {
    const InnerProduct x = make_inner_product(tag, d.ops);
    const PodBasis full = compute_pod_basis(build_snapshot_set(traj, SnapshotVariant::InitialPlusDerivatives, 1.0), x,
                                            d.ops, RankRule::full());
    for (int r = 1; r <= full.d_v; ++r) {
      const RomRun rom = solve_rom(fom, truncate(full, r, d.ops), x, traj.velocities.front(), cfg.rom_config());
      scan(rom.lifted);
      ++runs;
    }
  }
  return {violations == 0, "FOM + " + std::to_string(runs) + " ROM runs, " + std::to_string(violations) +
                               " increases, max relative step growth = " + fmt(worst)};
}

Outcome temporal_order() {
  RunConfig cfg;
  cfg.study_kind = "time";
  cfg.nx = cfg.ny = 16;
  cfg.final_time = 1.0;
  cfg.dts = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  cfg.reference_dt = 1.0 / 1024;
  const ConvergenceStudy st = run_convergence_study(cfg);
  bool pass = true;
  std::ostringstream os;
  auto rates = [&](const std::vector<RateRow>& rows, const char* name) {
    std::vector<double> h, e;
    for (const auto& r : rows) h.push_back(r.spacing), e.push_back(r.error_l2);
    os << name << " L2 rates";
    for (const auto& r : convergence_rates(e, h)) {
      os << ' ' << fmt(r.value);
      pass = pass && !r.saturated && r.value >= kTimeRateLo && r.value <= kTimeRateHi;
    }
  };
  rates(st.fom, "FOM");
  os << "; ";
  rates(st.rom, "ROM");
  os << " (r = " << st.rom_rank << ")";
  return {pass, os.str()};
}

Outcome compare_sets() {
  RunConfig cfg;  // defaults: 16-mesh, T = 1, dt = 1/64, three derivative-bearing variants
  const CompareSetsResult res = run_compare_sets(cfg);
  bool pass = true;
  std::ostringstream os;
  for (auto tag : kTags) {
    double lo = 1e300, hi = 0.0;
    int r = 0;
    for (const auto& e : res.entries) {
      if (e.x != tag) continue;
      const double v = tag == InnerProductTag::L2 ? e.rom.max_l2() : e.rom.max_h1();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      r = e.r;
    }
    pass = pass && hi <= kCompareFactor * lo;
    os << to_string(tag) << " (r = " << r << "): max ROM error " << fmt(lo) << ".." << fmt(hi) << ", ratio "
       << fmt(hi / lo) << "; ";
  }
  return {pass, os.str() + "limit " + fmt(kCompareFactor)};
}

}  // namespace

// --expect-fail i,j,... exits 0 only when exactly those criteria fail.
int main(int argc, char** argv) {
  std::set<std::size_t> expected;
  for (int a = 1; a < argc; ++a) {
    if (std::string(argv[a]) == "--expect-fail" && a + 1 < argc) {
      std::stringstream ss(argv[++a]);
      for (std::string tok; std::getline(ss, tok, ',');) expected.insert(std::stoul(tok));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail i,j,...]\n");
      return 64;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"tail identity", tail_identity},
      {"POD orthonormality and Gram structure", orthonormality},
      {"inverse inequalities", inverse_inequalities},
      {"pointwise lemmas", pointwise_lemmas},
      {"FOM spatial convergence", spatial_convergence},
      {"ROM/FOM consistency at full rank", full_rank_consistency},
      {"ROM error decay", rom_error_decay},
      {"energy stability", energy_stability},
      {"BDF2 temporal order", temporal_order},
      {"compare-sets study", compare_sets},
  };
  std::set<std::size_t> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%zu] %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) failed.insert(i + 1);
  }
  if (expected.empty()) return static_cast<int>(failed.size());
  std::printf("%zu failed, expected failures %s\n", failed.size(), failed == expected ? "match" : "DIFFER");
  return failed == expected ? 0 : 1;
}
