#include <doctest.h>

#include <cmath>
#include <random>

#include "tdpod/error.hpp"
#include "tdpod/snapshot_sets.hpp"

using namespace tdpod;

namespace {

Vector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// u(t) = c + g(t) w with exact derivative g'(t) w.
Trajectory synthetic(const Vector& c, const Vector& w, int m, double dt, double (*g)(double), double (*gp)(double)) {
  Trajectory tr;
  tr.dt = dt;
  for (int j = 0; j <= m; ++j) {
    const double t = j * dt;
    tr.times.push_back(t);
    tr.velocities.push_back(c + g(t) * w);
    tr.derivatives.push_back(gp(t) * w);
    tr.pressures.push_back(Vector::Zero(1));
  }
  return tr;
}

double zero(double) { return 0.0; }
double ident(double t) { return t; }
double one(double) { return 1.0; }

const std::vector<SnapshotVariant> kAll{SnapshotVariant::InitialPlusDerivatives, SnapshotVariant::MeanPlusDerivatives,
                                        SnapshotVariant::Fluctuations, SnapshotVariant::DifferenceQuotients,
                                        SnapshotVariant::RawVelocities};

}  // namespace

TEST_CASE("variant names round-trip") {
  for (auto v : kAll) CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_variant("everything"), Error);
}

TEST_CASE("set sizes") {
  std::mt19937_64 rng(1);
  const Trajectory tr = synthetic(random_vector(rng, 6), random_vector(rng, 6), 5, 0.1, ident, one);
  CHECK(build_snapshot_set(tr, SnapshotVariant::InitialPlusDerivatives, 1.0).size() == 6);
  CHECK(build_snapshot_set(tr, SnapshotVariant::MeanPlusDerivatives, 1.0).size() == 6);
  CHECK(build_snapshot_set(tr, SnapshotVariant::Fluctuations, 1.0).size() == 6);
  CHECK(build_snapshot_set(tr, SnapshotVariant::RawVelocities, 1.0).size() == 6);
  CHECK(build_snapshot_set(tr, SnapshotVariant::DifferenceQuotients, 1.0).size() == 5);
  CHECK_THROWS_AS(build_snapshot_set(tr, SnapshotVariant::Fluctuations, 0.0), Error);
}

TEST_CASE("constant trajectory gives zero fluctuations and zero quotients") {
  std::mt19937_64 rng(2);
  const Trajectory tr = synthetic(random_vector(rng, 8), random_vector(rng, 8), 4, 0.25, zero, zero);
  for (const auto& y : build_snapshot_set(tr, SnapshotVariant::Fluctuations, 1.0).members)
    CHECK(y.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& y : build_snapshot_set(tr, SnapshotVariant::DifferenceQuotients, 1.0).members)
    CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear trajectory: quotients and derivatives both equal tau w") {
  std::mt19937_64 rng(3);
  const Vector c = random_vector(rng, 7), w = random_vector(rng, 7);
  const double tau = 2.5;
  const Trajectory tr = synthetic(c, w, 6, 0.125, ident, one);
  for (const auto& y : build_snapshot_set(tr, SnapshotVariant::DifferenceQuotients, tau).members)
    CHECK((y - tau * w).cwiseAbs().maxCoeff() < 1e-12 * tau * w.cwiseAbs().maxCoeff());
  const SnapshotSet g = build_snapshot_set(tr, SnapshotVariant::InitialPlusDerivatives, tau);
  CHECK((g.members[0] - std::sqrt(7.0) * c).norm() < 1e-14 * c.norm());
  for (int j = 1; j < g.size(); ++j) CHECK((g.members[j] - tau * w).norm() < 1e-14 * w.norm());
  CHECK(g.tau == tau);
  CHECK(g.variant == SnapshotVariant::InitialPlusDerivatives);
  const SnapshotSet mean = build_snapshot_set(tr, SnapshotVariant::MeanPlusDerivatives, tau);
  // mean of c + t_j w over t_j = j/8, j=0..6 is c + (3/8) w
  CHECK((mean.members[0] - std::sqrt(7.0) * (c + 0.375 * w)).norm() < 1e-13 * c.norm());
  const SnapshotSet raw = build_snapshot_set(tr, SnapshotVariant::RawVelocities, tau);
  for (int j = 0; j < raw.size(); ++j) CHECK(raw.members[j] == tr.velocities[j]);
}

TEST_CASE("fluctuations have zero mean") {
  std::mt19937_64 rng(4);
  Trajectory tr;
  tr.dt = 0.1;
  for (int j = 0; j <= 9; ++j) {
    tr.times.push_back(0.1 * j);
    tr.velocities.push_back(1e3 * Vector::Ones(10) + random_vector(rng, 10));
    tr.derivatives.push_back(random_vector(rng, 10));
  }
  const SnapshotSet f = build_snapshot_set(tr, SnapshotVariant::Fluctuations, 1.0);
  Vector sum = Vector::Zero(10);
  double mx = 0;
  for (const auto& y : f.members) sum += y, mx = std::max(mx, y.norm());
  CHECK(sum.norm() / f.size() <= 1e-12 * mx);
  // the fluctuation trajectory has a zero mean anchor
  const SnapshotSet m = build_snapshot_set(fluctuation_trajectory(tr), SnapshotVariant::MeanPlusDerivatives, 1.0);
  CHECK(m.members[0].norm() <= 1e-12 * mx);
  CHECK((temporal_mean(fluctuation_trajectory(tr).velocities)).norm() <= 1e-12 * mx);
}

TEST_CASE("derivative variants need a time step and derivatives") {
  std::mt19937_64 rng(5);
  const Trajectory one_level = synthetic(random_vector(rng, 4), random_vector(rng, 4), 0, 0.1, ident, one);
  CHECK_THROWS_AS(build_snapshot_set(one_level, SnapshotVariant::InitialPlusDerivatives, 1.0), Error);
  CHECK_THROWS_AS(build_snapshot_set(one_level, SnapshotVariant::DifferenceQuotients, 1.0), Error);
  CHECK(build_snapshot_set(one_level, SnapshotVariant::RawVelocities, 1.0).size() == 1);
  Trajectory no_deriv = synthetic(random_vector(rng, 4), random_vector(rng, 4), 3, 0.1, ident, one);
  no_deriv.derivatives.clear();
  CHECK_THROWS_AS(build_snapshot_set(no_deriv, SnapshotVariant::MeanPlusDerivatives, 1.0), Error);
}
