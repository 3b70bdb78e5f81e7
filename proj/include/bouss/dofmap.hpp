/// @file dofmap.hpp
/// @brief Mapping from mesh entities to global degrees of freedom, plus
///        discrete coefficient fields.
#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "bouss/element.hpp"
#include "bouss/mesh.hpp"

namespace bouss {

/// Scalar dof map for one element family. Vector fields use the same map
/// with component-blocked storage (all x-dofs, then all y-dofs).
struct DofMap {
  ElementKind element = ElementKind::P1;
  const Mesh* mesh = nullptr;
  int n_dofs = 0;
  std::vector<std::vector<int>> cell_to_global;      // local -> global per cell
  std::vector<std::array<double, 2>> dof_coords;     // nodal dofs; P0 uses centroids
  std::map<Side, std::vector<int>> boundary_dofs;    // per-marker, sorted unique
};

inline DofMap build_dofmap(const Mesh& mesh, ElementKind element) {
  DofMap dm;
  dm.element = element;
  dm.mesh = &mesh;
  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();

  if (element == ElementKind::P0) {
    dm.n_dofs = nt;
    dm.cell_to_global.resize(nt);
    dm.dof_coords.resize(nt);
    for (int t = 0; t < nt; ++t) {
      dm.cell_to_global[t] = {t};
      const auto& tri = mesh.triangles[t];
      dm.dof_coords[t] = {
          (mesh.vertices[tri[0]][0] + mesh.vertices[tri[1]][0] + mesh.vertices[tri[2]][0]) / 3.0,
          (mesh.vertices[tri[0]][1] + mesh.vertices[tri[1]][1] + mesh.vertices[tri[2]][1]) / 3.0};
    }
    return dm;
  }

  // global edge numbering for P2 midpoint dofs
  std::map<std::pair<int, int>, int> edge_index;
  auto edge_id = [&](int p, int q) {
    if (p > q) std::swap(p, q);
    auto [it, inserted] = edge_index.try_emplace({p, q}, static_cast<int>(edge_index.size()));
    return it->second;
  };

  dm.cell_to_global.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    if (element == ElementKind::P1) {
      dm.cell_to_global[t] = {tri[0], tri[1], tri[2]};
    } else {  // P2: vertices then midpoints of edges (0,1), (1,2), (2,0)
      dm.cell_to_global[t] = {tri[0],
                              tri[1],
                              tri[2],
                              nv + edge_id(tri[0], tri[1]),
                              nv + edge_id(tri[1], tri[2]),
                              nv + edge_id(tri[2], tri[0])};
    }
  }

  const int ne = static_cast<int>(edge_index.size());
  dm.n_dofs = (element == ElementKind::P1) ? nv : nv + ne;
  dm.dof_coords.resize(dm.n_dofs);
  for (int v = 0; v < nv; ++v) dm.dof_coords[v] = mesh.vertices[v];
  if (element == ElementKind::P2)
    for (const auto& [edge, id] : edge_index) {
      const auto& p = mesh.vertices[edge.first];
      const auto& q = mesh.vertices[edge.second];
      dm.dof_coords[nv + id] = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    }

  if (element != ElementKind::P0) {
    std::map<Side, std::vector<int>> bd;
    for (const auto& be : mesh.boundary_edges) {
      auto& list = bd[be.side];
      list.push_back(be.a);
      list.push_back(be.b);
      if (element == ElementKind::P2) {
        int p = be.a, q = be.b;
        if (p > q) std::swap(p, q);
        auto it = edge_index.find({p, q});
        if (it == edge_index.end())
          throw std::logic_error("build_dofmap: boundary edge not in triangulation");
        list.push_back(nv + it->second);
      }
    }
    for (auto& [side, list] : bd) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    dm.boundary_dofs = std::move(bd);
  }
  return dm;
}

/// All boundary dofs across markers, sorted unique.
inline std::vector<int> all_boundary_dofs(const DofMap& dm) {
  std::vector<int> out;
  for (const auto& [side, list] : dm.boundary_dofs)
    out.insert(out.end(), list.begin(), list.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct DiscreteField {
  const DofMap* dofmap = nullptr;
  int components = 1;
  std::vector<double> coefficients;  // component-blocked for vector fields

  DiscreteField() = default;
  DiscreteField(const DofMap& dm, int comps)
      : dofmap(&dm), components(comps),
        coefficients(static_cast<std::size_t>(dm.n_dofs) * comps, 0.0) {}

  double& at(int component, int dof) {
    return coefficients[static_cast<std::size_t>(component) * dofmap->n_dofs + dof];
  }
  double at(int component, int dof) const {
    return coefficients[static_cast<std::size_t>(component) * dofmap->n_dofs + dof];
  }
};

}  // namespace bouss
