#include <doctest.h>

#include <cmath>

#include "tdpod/error.hpp"
#include "tdpod/mesh.hpp"

using namespace tdpod;

TEST_CASE("single cell splits into two triangles") {
  const Mesh m = build_rect_mesh(1, 1);
  CHECK(m.n_vertices() == 4);
  CHECK(m.n_triangles() == 2);
  CHECK(m.boundary_edges.size() == 4);
  for (const auto& e : m.boundary_edges) CHECK(e.tag == "dirichlet");
}

TEST_CASE("2x2 grid geometry") {
  const Mesh m = build_rect_mesh(2, 2);
  CHECK(m.n_vertices() == 9);
  CHECK(m.n_triangles() == 8);
  CHECK(m.h_max == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
}

TEST_CASE("areas partition the rectangle") {
  const Mesh m = build_rect_mesh(8, 8);
  CHECK(std::abs(total_area(m) - 1.0) < 1e-12);
  const Mesh r = build_rect_mesh(3, 5, {-1.0, 0.5, 2.0, 1.75});
  CHECK(std::abs(total_area(r) - r.rect.area()) < 1e-12 * r.rect.area());
  CHECK(has_positive_orientation(r));
  CHECK(is_edge_manifold(r));
}

TEST_CASE("degenerate input is rejected") {
  CHECK_THROWS_AS(build_rect_mesh(0, 1), Error);
  CHECK_THROWS_AS(build_rect_mesh(1, 1, {0, 0, 0, 1}), Error);
  CHECK_THROWS_AS(build_rect_mesh(1, 1, {0, 1, 1, 1}), Error);
}

TEST_CASE("refinement quarters triangles and halves h") {
  const Mesh m = build_rect_mesh(1, 1);
  const Mesh r = refine_uniform(m);
  CHECK(r.n_triangles() == 8);
  CHECK(std::abs(r.h_max - m.h_max / 2) < 1e-14);
  CHECK(r.h_max / r.h_min == doctest::Approx(m.h_max / m.h_min));
}

TEST_CASE("refinement matches a direct build") {
  for (int nx : {1, 2, 3}) {
    const int ny = nx + 1;
    const Mesh twice = refine_uniform(refine_uniform(build_rect_mesh(nx, ny)));
    const Mesh direct = build_rect_mesh(4 * nx, 4 * ny);
    CHECK(twice.n_vertices() == direct.n_vertices());
    CHECK(twice.n_triangles() == direct.n_triangles());
    CHECK(twice.boundary_edges.size() == direct.boundary_edges.size());
    CHECK(std::abs(twice.h_max - direct.h_max) < 1e-14);
  }
}

TEST_CASE("structural invariants survive repeated refinement") {
  Mesh m = build_rect_mesh(2, 3, {0, 0, 2, 1});
  const double ratio = m.h_max / m.h_min;
  for (int k = 0; k < 3; ++k) {
    m = refine_uniform(m);
    CHECK(has_positive_orientation(m));
    CHECK(is_edge_manifold(m));
    CHECK(std::abs(total_area(m) - 2.0) < 1e-12 * 2.0);
    CHECK(m.h_max / m.h_min == doctest::Approx(ratio).epsilon(1e-12));
    CHECK(m.h_max / m.h_min <= 4.0);
  }
}
