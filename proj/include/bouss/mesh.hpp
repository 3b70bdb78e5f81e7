/// @file mesh.hpp
/// @brief Structured triangulations of axis-aligned rectangles with
///        boundary-edge tagging, uniform refinement and barycentric
///        (Alfeld) refinement.
#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bouss {

enum class Side : std::uint8_t { left, right, bottom, top };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

struct BoundaryEdge {
  int a, b;   // vertex indices, oriented along the boundary
  Side side;
};

/// Conforming triangulation of a rectangle. Immutable after construction;
/// safe to share read-only across threads.
struct Mesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW orientation
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;  // max triangle diameter (= longest edge)

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
};

struct RectSpec {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  int nx = 1, ny = 1;
};

inline double signed_area(const Mesh& m, int t) {
  const auto& tri = m.triangles[t];
  const auto& a = m.vertices[tri[0]];
  const auto& b = m.vertices[tri[1]];
  const auto& c = m.vertices[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

inline double longest_edge(const Mesh& m, int t) {
  const auto& tri = m.triangles[t];
  double len = 0.0;
  for (int e = 0; e < 3; ++e) {
    const auto& p = m.vertices[tri[e]];
    const auto& q = m.vertices[tri[(e + 1) % 3]];
    len = std::max(len, std::hypot(q[0] - p[0], q[1] - p[1]));
  }
  return len;
}

inline void recompute_h(Mesh& m) {
  m.h = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    m.h = std::max(m.h, longest_edge(m, t));
}

/// Structured mesh of a rectangle, each cell split along its
/// lower-left -> upper-right diagonal. 2*nx*ny triangles.
inline Mesh build_rect_mesh(const RectSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1)
    throw std::invalid_argument("build_rect_mesh: subdivision counts must be >= 1");
  if (!(spec.x1 > spec.x0) || !(spec.y1 > spec.y0))
    throw std::invalid_argument("build_rect_mesh: degenerate rectangle");

  Mesh m;
  const int nx = spec.nx, ny = spec.ny;
  const double dx = (spec.x1 - spec.x0) / nx;
  const double dy = (spec.y1 - spec.y0) / ny;

  m.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({spec.x0 + i * dx, spec.y0 + j * dy});

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  m.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }

  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), Side::bottom});
    m.boundary_edges.push_back({vid(i + 1, ny), vid(i, ny), Side::top});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_edges.push_back({vid(0, j + 1), vid(0, j), Side::left});
    m.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), Side::right});
  }

  recompute_h(m);
  return m;
}

/// Alfeld split: each triangle becomes three children meeting at its
/// barycenter. Parent vertices are preserved; boundary edges unchanged.
inline Mesh barycentric_refine(const Mesh& mesh) {
  Mesh out;
  out.vertices = mesh.vertices;
  out.boundary_edges = mesh.boundary_edges;
  out.triangles.reserve(3 * mesh.num_triangles());
  for (const auto& tri : mesh.triangles) {
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    const int g = static_cast<int>(out.vertices.size());
    out.vertices.push_back({(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0});
    out.triangles.push_back({tri[0], tri[1], g});
    out.triangles.push_back({tri[1], tri[2], g});
    out.triangles.push_back({tri[2], tri[0], g});
  }
  recompute_h(out);
  return out;
}

struct MeshDiagnostics {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

/// Checks orientation, edge manifoldness and area consistency against the
/// vertex bounding box. Diagnostic only: never throws.
inline MeshDiagnostics validate(const Mesh& m) {
  MeshDiagnostics d;
  double total_area = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double a = signed_area(m, t);
    if (!(a > 0.0))
      d.issues.push_back("triangle " + std::to_string(t) + ": non-positive orientation");
    total_area += a;
  }

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : m.triangles)
    for (int e = 0; e < 3; ++e) {
      int p = tri[e], q = tri[(e + 1) % 3];
      if (p > q) std::swap(p, q);
      ++edge_count[{p, q}];
    }
  std::map<std::pair<int, int>, int> boundary;
  for (const auto& be : m.boundary_edges) {
    int p = be.a, q = be.b;
    if (p > q) std::swap(p, q);
    ++boundary[{p, q}];
  }
  for (const auto& [edge, count] : edge_count) {
    const bool on_boundary = boundary.count(edge) > 0;
    const int expected = on_boundary ? 1 : 2;
    if (count != expected)
      d.issues.push_back("edge (" + std::to_string(edge.first) + "," +
                         std::to_string(edge.second) + "): shared by " +
                         std::to_string(count) + " triangle(s), expected " +
                         std::to_string(expected));
  }

  if (!m.vertices.empty()) {
    double xmin = m.vertices[0][0], xmax = xmin, ymin = m.vertices[0][1], ymax = ymin;
    for (const auto& v : m.vertices) {
      xmin = std::min(xmin, v[0]); xmax = std::max(xmax, v[0]);
      ymin = std::min(ymin, v[1]); ymax = std::max(ymax, v[1]);
    }
    const double rect_area = (xmax - xmin) * (ymax - ymin);
    if (rect_area > 0.0 && std::abs(total_area - rect_area) > 1e-12 * rect_area)
      d.issues.push_back("triangle areas sum to " + std::to_string(total_area) +
                         ", bounding rectangle area is " + std::to_string(rect_area));
  }
  return d;
}

/// Plain-text dump: one "x y" line per vertex, then one "i j k" line per
/// triangle (zero-based).
inline void write_mesh_txt(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_txt: cannot open " + path);
  out.precision(17);
  for (const auto& v : m.vertices) out << v[0] << " " << v[1] << "\n";
  for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

}  // namespace bouss
