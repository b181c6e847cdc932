#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace tdpod {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

struct BoundaryEdge {
  std::array<int, 2> vertices;
  std::string tag;
};

/// Triangulation of an axis-aligned rectangle. Triangles are stored
/// counter-clockwise; the whole outer boundary carries the tag "dirichlet".
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  Rect rect;
  double h_max = 0.0;
  double h_min = 0.0;

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_triangles() const { return triangles.size(); }
  double signed_area(std::size_t t) const;
  double diameter(std::size_t t) const;
};

/// nx*ny grid cells, each split along the lower-left to upper-right diagonal.
Mesh build_rect_mesh(int nx, int ny, const Rect& rect = {});

/// Red refinement: every triangle is split into four congruent children.
Mesh refine_uniform(const Mesh& mesh);

// Structural checks used by tests and `check invariants`.
bool has_positive_orientation(const Mesh& mesh);
bool is_edge_manifold(const Mesh& mesh);
double total_area(const Mesh& mesh);

/// Writes vertices.csv (id,x,y), triangles.csv (id,v0,v1,v2) and
/// boundary.csv (v0,v1,tag) into `dir`.
void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir);

}  // namespace tdpod
