#include "tdpod/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <utility>

#include "tdpod/error.hpp"
#include "tdpod/io.hpp"

namespace tdpod {

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void update_diameters(Mesh& m) {
  m.h_max = 0.0;
  m.h_min = std::numeric_limits<double>::max();
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const double d = m.diameter(t);
    m.h_max = std::max(m.h_max, d);
    m.h_min = std::min(m.h_min, d);
  }
}

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::diameter(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return std::max({dist(a, b), dist(b, c), dist(c, a)});
}

Mesh build_rect_mesh(int nx, int ny, const Rect& rect) {
  if (nx < 1 || ny < 1) fail_input("build_rect_mesh: nx and ny must be positive");
  if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) fail_input("build_rect_mesh: degenerate rectangle");

  Mesh m;
  m.rect = rect;
  const double dx = (rect.x1 - rect.x0) / nx;
  const double dy = (rect.y1 - rect.y0) / ny;
  m.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({i == nx ? rect.x1 : rect.x0 + i * dx, j == ny ? rect.y1 : rect.y0 + j * dy});

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }

  for (int i = 0; i < nx; ++i) m.boundary_edges.push_back({{vid(i, 0), vid(i + 1, 0)}, "dirichlet"});
  for (int j = 0; j < ny; ++j) m.boundary_edges.push_back({{vid(nx, j), vid(nx, j + 1)}, "dirichlet"});
  for (int i = nx; i > 0; --i) m.boundary_edges.push_back({{vid(i, ny), vid(i - 1, ny)}, "dirichlet"});
  for (int j = ny; j > 0; --j) m.boundary_edges.push_back({{vid(0, j), vid(0, j - 1)}, "dirichlet"});

  update_diameters(m);
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.rect = mesh.rect;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Point& pa = mesh.vertices[a];
    const Point& pb = mesh.vertices[b];
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    midpoint.emplace(key, id);
    return id;
  };

  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  for (const auto& e : mesh.boundary_edges) {
    const int m = mid(e.vertices[0], e.vertices[1]);
    out.boundary_edges.push_back({{e.vertices[0], m}, e.tag});
    out.boundary_edges.push_back({{m, e.vertices[1]}, e.tag});
  }
  update_diameters(out);
  return out;
}

bool has_positive_orientation(const Mesh& mesh) {
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (!(mesh.signed_area(t) > 0.0)) return false;
  return true;
}

bool is_edge_manifold(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
  std::map<std::pair<int, int>, int> boundary;
  for (const auto& e : mesh.boundary_edges) ++boundary[edge_key(e.vertices[0], e.vertices[1])];
  for (const auto& [key, n] : count) {
    const bool on_boundary = boundary.count(key) > 0;
    if (on_boundary && (n != 1 || boundary[key] != 1)) return false;
    if (!on_boundary && n != 2) return false;
  }
  for (const auto& [key, n] : boundary)
    if (count.count(key) == 0) return false;
  return true;
}

double total_area(const Mesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) a += mesh.signed_area(t);
  return a;
}

void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f = open_output(dir / "vertices.csv");
    f << "id,x,y\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
      f << i << ',' << fmt_double(mesh.vertices[i].x) << ',' << fmt_double(mesh.vertices[i].y) << '\n';
  }
  {
    std::ofstream f = open_output(dir / "triangles.csv");
    f << "id,v0,v1,v2\n";
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
      const auto& t = mesh.triangles[i];
      f << i << ',' << t[0] << ',' << t[1] << ',' << t[2] << '\n';
    }
  }
  std::ofstream f = open_output(dir / "boundary.csv");
  f << "v0,v1,tag\n";
  for (const auto& e : mesh.boundary_edges) f << e.vertices[0] << ',' << e.vertices[1] << ',' << e.tag << '\n';
}

}  // namespace tdpod
