#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "tdpod/error.hpp"
#include "tdpod/pipeline.hpp"

using namespace tdpod;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tdpod_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Vector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("doubles print with round-trip precision") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 100; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 20 - 10);
    CHECK(std::stod(fmt_double(v)) == v);
  }
  CHECK(std::stod(fmt_double(0.1)) == 0.1);
}

TEST_CASE("vector files round-trip") {
  const fs::path dir = scratch("vec");
  std::mt19937_64 rng(42);
  const Vector v = random_vector(rng, 37);
  save_vector_binary(v, dir / "v.bin");
  CHECK(load_vector_binary(dir / "v.bin") == v);
  CHECK(fs::file_size(dir / "v.bin") == 16 + 8 * 37);
  save_vector_csv(v, dir / "v.csv");
  CHECK(load_vector_csv(dir / "v.csv") == v);
  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "NOTAVECT";
  }
  CHECK_THROWS_AS(load_vector_binary(dir / "bad.bin"), Error);
  CHECK_THROWS_AS(load_vector_binary(dir / "missing.bin"), Error);
}

TEST_CASE("mesh and sparse exports") {
  const fs::path dir = scratch("mesh");
  const Mesh m = build_rect_mesh(2, 3);
  write_mesh_csv(m, dir);
  std::vector<std::string> header;
  CHECK(read_csv_rows(dir / "vertices.csv", &header).size() == m.n_vertices());
  CHECK(header == std::vector<std::string>{"id", "x", "y"});
  CHECK(read_csv_rows(dir / "triangles.csv").size() == m.n_triangles());
  CHECK(read_csv_rows(dir / "boundary.csv").size() == m.boundary_edges.size());
  SparseMatrix s(3, 3);
  s.insert(0, 1) = 2.5;
  s.insert(2, 0) = -1.0;
  write_sparse_coo_csv(s, dir / "s.csv");
  const auto rows = read_csv_rows(dir / "s.csv", &header);
  CHECK(header == std::vector<std::string>{"row", "col", "value"});
  CHECK(rows.size() == 2);
}

TEST_CASE("trajectory, snapshot set and basis directories round-trip") {
  const fs::path dir = scratch("store");
  const Discretization d = make_discretization(2, 2, 0, 2);
  std::mt19937_64 rng(43);
  Trajectory tr;
  tr.dt = 0.25;
  for (int j = 0; j <= 3; ++j) {
    tr.times.push_back(0.25 * j);
    tr.velocities.push_back(d.space->zero_boundary(random_vector(rng, d.space->n_velocity())));
    tr.derivatives.push_back(d.space->zero_boundary(random_vector(rng, d.space->n_velocity())));
    tr.pressures.push_back(random_vector(rng, d.space->n_pressure()));
  }
  save_trajectory(tr, dir / "traj", Json{{"nu", 0.5}});
  Json cfg;
  const Trajectory back = load_trajectory(dir / "traj", &cfg);
  CHECK(cfg["nu"] == 0.5);
  CHECK(back.dt == tr.dt);
  CHECK(back.times == tr.times);
  for (int j = 0; j <= 3; ++j) {
    CHECK(back.velocities[j] == tr.velocities[j]);
    CHECK(back.derivatives[j] == tr.derivatives[j]);
    CHECK(back.pressures[j] == tr.pressures[j]);
  }

  const SnapshotSet set = build_snapshot_set(tr, SnapshotVariant::MeanPlusDerivatives, 2.0);
  save_snapshot_set(set, dir / "set", Json::object());
  const SnapshotSet set_back = load_snapshot_set(dir / "set");
  CHECK(set_back.variant == set.variant);
  CHECK(set_back.tau == 2.0);
  CHECK(set_back.size() == set.size());
  for (int j = 0; j < set.size(); ++j) CHECK(set_back.members[j] == set.members[j]);

  const InnerProduct x = make_inner_product(InnerProductTag::H1, d.ops);
  PodBasis b = compute_pod_basis(set, x, d.ops, RankRule::explicit_rank(3));
  b.variant = to_string(set.variant);
  b.tau = set.tau;
  save_basis(b, dir / "basis", Json::object());
  const PodBasis bb = load_basis(dir / "basis", d.ops);
  CHECK(bb.tag == b.tag);
  CHECK(bb.r == 3);
  CHECK(bb.d_v == b.d_v);
  CHECK(bb.eigenvalues == b.eigenvalues);
  for (int k = 0; k < 3; ++k) CHECK(bb.modes[k] == b.modes[k]);
  CHECK((bb.stiffness - b.stiffness).cwiseAbs().maxCoeff() == 0.0);
  const auto ev = read_csv_rows(dir / "basis" / "eigenvalues.csv");
  CHECK(ev.size() == static_cast<std::size_t>(b.eigenvalues.size()));

  // directories of the wrong kind are rejected
  CHECK_THROWS_AS(load_trajectory(dir / "basis"), Error);
  CHECK_THROWS_AS(load_basis(dir / "traj", d.ops), Error);
  const Discretization other = make_discretization(3, 3, 0, 2);
  CHECK_THROWS_AS(load_basis(dir / "basis", other.ops), Error);
}

TEST_CASE("reduced trajectory and singular value tables") {
  const fs::path dir = scratch("tables");
  RomTrajectory tr;
  tr.dt = 0.5;
  tr.times = {0.0, 0.5};
  tr.coords = {Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)};
  write_reduced_trajectory_csv(tr, dir / "reduced.csv");
  std::vector<std::string> header;
  const auto rows = read_csv_rows(dir / "reduced.csv", &header);
  CHECK(header == std::vector<std::string>{"t", "a_1", "a_2"});
  CHECK(rows.size() == 2);
  CHECK(std::stod(rows[1][2]) == 4.0);

  PodBasis b;
  b.eigenvalues = Eigen::Vector3d(4.0, 1.0, 0.0);
  b.d_v = 2;
  b.variant = "fluctuations";
  {
    CsvWriter w(dir / "sv.csv", {"variant", "x", "k", "sigma_k", "sigma_rel"});
    append_singular_values(w, b);
  }
  const auto sv = read_csv_rows(dir / "sv.csv");
  REQUIRE(sv.size() == 2);
  CHECK(std::stod(sv[0][3]) == 2.0);
  CHECK(std::stod(sv[0][4]) == doctest::Approx(2.0 / std::sqrt(5.0)));
}

TEST_CASE("rates table puts rates on the finer row") {
  const fs::path dir = scratch("rates");
  write_rates_csv({{0, 1.0, 1.0, 2.0}, {1, 0.5, 0.25, 1.0}, {2, 0.25, 0.0, 0.5}}, dir / "rates.csv");
  std::vector<std::string> header;
  const auto rows = read_csv_rows(dir / "rates.csv", &header);
  CHECK(header == std::vector<std::string>{"level", "h_or_dt", "error_L2", "error_H1", "rate_L2", "rate_H1"});
  CHECK(rows[0][4].empty());
  CHECK(std::stod(rows[1][4]) == doctest::Approx(2.0));
  CHECK(std::stod(rows[1][5]) == doctest::Approx(1.0));
  CHECK(rows[2][4] == "saturated");
}

TEST_CASE("report rows") {
  const fs::path dir = scratch("report");
  write_report_csv({{"a", 3, 1.0, 2.0, 1.0, true}, {"b", -1, 2.0, 1.0, -1.0, false}}, dir / "report.csv");
  std::vector<std::string> header;
  const auto rows = read_csv_rows(dir / "report.csv", &header);
  CHECK(header == std::vector<std::string>{"check_id", "time_index", "lhs", "rhs", "margin", "pass"});
  CHECK(rows[0][5] == "1");
  CHECK(rows[1][5] == "0");
}

TEST_CASE("run config parsing") {
  const RunConfig def = RunConfig::from_json(Json::object());
  CHECK(def.mu == 0.01);
  CHECK(def.effective_tau() == def.final_time);
  const Json j = Json::parse(R"({"mesh": {"nx": 4, "ny": 6}, "T": 0.5, "x": "H1", "variant": "fluctuations",
                                 "study": {"variants": ["difference_quotients"]}, "tau": null})");
  const RunConfig c = RunConfig::from_json(j);
  CHECK(c.nx == 4);
  CHECK(c.ny == 6);
  CHECK(c.final_time == 0.5);
  CHECK(c.x == InnerProductTag::H1);
  CHECK(c.variant == SnapshotVariant::Fluctuations);
  CHECK(c.variants == std::vector<SnapshotVariant>{SnapshotVariant::DifferenceQuotients});
  CHECK(!c.tau);
  // to_json round-trips
  const RunConfig again = RunConfig::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());
  // layering keeps the base for absent keys
  const RunConfig layered = RunConfig::from_json(Json{{"nu", 0.5}}, c);
  CHECK(layered.nu == 0.5);
  CHECK(layered.nx == 4);
  CHECK(RunConfig::from_json(Json{{"r", 0}}).rank_rule().threshold == default_threshold(InnerProductTag::L2));
  CHECK(RunConfig::from_json(Json{{"r", 5}}).rank_rule().r == 5);

  CHECK_THROWS_AS(RunConfig::from_json(Json{{"bogus", 1}}), Error);
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"mesh", {{"nz", 1}}}}), Error);
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"nu", "small"}}), Error);
  CHECK_THROWS_AS(RunConfig::from_json(Json::array()), Error);
  for (const char* bad : {R"({"nu": 0})", R"({"mesh": {"nx": 0}})", R"({"degree": 1})", R"({"dt": 0.3, "T": 1})"}) {
    CHECK_THROWS_AS(RunConfig::from_json(Json::parse(bad)).validate(), Error);
  }
}
