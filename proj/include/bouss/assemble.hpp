/// @file assemble.hpp
/// @brief Assembly of every bilinear/trilinear form of the time stepper:
///        mass, stiffness, divergence, grad-div, skew convection, buoyancy,
///        L2 projection and Dirichlet elimination.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "bouss/dofmap.hpp"
#include "bouss/quadrature.hpp"
#include "bouss/sparse.hpp"

namespace bouss {

using ScalarFunc = std::function<double(double, double)>;

namespace detail {

/// Reference-element tables for one quadrature rule.
struct RefTables {
  QuadratureRule rule;
  std::vector<std::vector<double>> values;                  // [pt][dof]
  std::vector<std::vector<std::array<double, 2>>> grads;    // [pt][dof]
};

inline RefTables ref_tables(ElementKind e, int degree) {
  RefTables t;
  t.rule = quadrature_rule(degree);
  const int nd = local_dof_count(e);
  t.values.resize(t.rule.points.size(), std::vector<double>(nd));
  t.grads.resize(t.rule.points.size(), std::vector<std::array<double, 2>>(nd));
  for (std::size_t q = 0; q < t.rule.points.size(); ++q) {
    basis_values(e, t.rule.points[q].bary, t.values[q].data());
    basis_gradients(e, t.rule.points[q].bary, t.grads[q].data());
  }
  return t;
}

/// Affine cell map: Jacobian determinant and inverse-transpose for
/// push-forward of reference gradients.
struct CellGeom {
  double det;                    // = 2 * area, positive for CCW cells
  std::array<double, 4> invJT;   // row-major 2x2
  std::array<double, 2> origin;
  std::array<double, 4> J;       // row-major 2x2, columns (b-a), (c-a)
};

inline CellGeom cell_geom(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& a = mesh.vertices[tri[0]];
  const auto& b = mesh.vertices[tri[1]];
  const auto& c = mesh.vertices[tri[2]];
  CellGeom g;
  g.origin = a;
  g.J = {b[0] - a[0], c[0] - a[0], b[1] - a[1], c[1] - a[1]};
  g.det = g.J[0] * g.J[3] - g.J[1] * g.J[2];
  if (!(g.det > 0.0))
    throw std::invalid_argument("assembly: triangle " + std::to_string(t) +
                                " is degenerate or mis-oriented");
  const double inv = 1.0 / g.det;
  // J^{-T} = (1/det) [[ J22, -J21 ], [ -J12, J11 ]]
  g.invJT = {g.J[3] * inv, -g.J[2] * inv, -g.J[1] * inv, g.J[0] * inv};
  return g;
}

inline std::array<double, 2> physical_point(const CellGeom& g, const std::array<double, 3>& bary) {
  return {g.origin[0] + g.J[0] * bary[1] + g.J[1] * bary[2],
          g.origin[1] + g.J[2] * bary[1] + g.J[3] * bary[2]};
}

inline std::array<double, 2> push_grad(const CellGeom& g, const std::array<double, 2>& ref) {
  return {g.invJT[0] * ref[0] + g.invJT[1] * ref[1],
          g.invJT[2] * ref[0] + g.invJT[3] * ref[1]};
}

}  // namespace detail

/// Scalar mass matrix: (M w, v) = integral of w v.
inline SparseMatrix assemble_mass(const DofMap& dm, int degree = -1) {
  if (degree < 0) degree = 2 * polynomial_degree(dm.element);
  degree = std::max(degree, 1);
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  std::vector<Triplet> trips;
  trips.reserve(dm.mesh->num_triangles() * nd * nd);
  for (int t = 0; t < dm.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*dm.mesh, t);
    const auto& dofs = dm.cell_to_global[t];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      const double w = tab.rule.points[q].weight * g.det;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          trips.emplace_back(dofs[i], dofs[j], w * tab.values[q][i] * tab.values[q][j]);
    }
  }
  return from_triplets(dm.n_dofs, dm.n_dofs, trips);
}

/// Scalar stiffness: coefficient * (grad w, grad v).
inline SparseMatrix assemble_stiffness(const DofMap& dm, double coefficient, int degree = -1) {
  if (!(coefficient > 0.0))
    throw std::invalid_argument("assemble_stiffness: coefficient must be positive");
  if (degree < 0) degree = std::max(2 * (polynomial_degree(dm.element) - 1), 1);
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  std::vector<Triplet> trips;
  trips.reserve(dm.mesh->num_triangles() * nd * nd);
  std::vector<std::array<double, 2>> pg(nd);
  for (int t = 0; t < dm.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*dm.mesh, t);
    const auto& dofs = dm.cell_to_global[t];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      const double w = coefficient * tab.rule.points[q].weight * g.det;
      for (int i = 0; i < nd; ++i) pg[i] = detail::push_grad(g, tab.grads[q][i]);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          trips.emplace_back(dofs[i], dofs[j], w * (pg[i][0] * pg[j][0] + pg[i][1] * pg[j][1]));
    }
  }
  return from_triplets(dm.n_dofs, dm.n_dofs, trips);
}

/// Block-diagonal expansion of a scalar operator to a 2-component field
/// with component-blocked dofs.
inline SparseMatrix block_diag2(const SparseMatrix& S) {
  const int n = static_cast<int>(S.rows());
  std::vector<Triplet> trips;
  trips.reserve(2 * S.nonZeros());
  for (int k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      trips.emplace_back(n + static_cast<int>(it.row()), n + static_cast<int>(it.col()), it.value());
    }
  return from_triplets(2 * n, 2 * static_cast<int>(S.cols()), trips);
}

/// Divergence pairing B with (B v)_q = integral of q (div v); rows are
/// pressure dofs, columns component-blocked velocity dofs.
inline SparseMatrix assemble_divergence(const DofMap& vel, const DofMap& pres, int degree = -1) {
  if (vel.mesh != pres.mesh)
    throw std::invalid_argument("assemble_divergence: dofmaps live on different meshes");
  if (vel.element != ElementKind::P2 ||
      (pres.element != ElementKind::P1 && pres.element != ElementKind::P0))
    throw std::invalid_argument("assemble_divergence: unsupported mixed pair");
  if (degree < 0)
    degree = std::max(polynomial_degree(vel.element) - 1 + polynomial_degree(pres.element), 1);
  const auto vt = detail::ref_tables(vel.element, degree);
  const auto pt = detail::ref_tables(pres.element, degree);
  const int ndv = local_dof_count(vel.element);
  const int ndp = local_dof_count(pres.element);
  const int nu = vel.n_dofs;
  std::vector<Triplet> trips;
  std::vector<std::array<double, 2>> pg(ndv);
  for (int t = 0; t < vel.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*vel.mesh, t);
    const auto& vdofs = vel.cell_to_global[t];
    const auto& pdofs = pres.cell_to_global[t];
    for (std::size_t q = 0; q < vt.rule.points.size(); ++q) {
      const double w = vt.rule.points[q].weight * g.det;
      for (int j = 0; j < ndv; ++j) pg[j] = detail::push_grad(g, vt.grads[q][j]);
      for (int i = 0; i < ndp; ++i) {
        const double qv = w * pt.values[q][i];
        for (int j = 0; j < ndv; ++j) {
          trips.emplace_back(pdofs[i], vdofs[j], qv * pg[j][0]);
          trips.emplace_back(pdofs[i], nu + vdofs[j], qv * pg[j][1]);
        }
      }
    }
  }
  return from_triplets(pres.n_dofs, 2 * nu, trips);
}

/// Grad-div operator G with (G w, v) = integral of (div w)(div v).
inline SparseMatrix assemble_graddiv(const DofMap& vel, int degree = -1) {
  if (degree < 0) degree = std::max(2 * (polynomial_degree(vel.element) - 1), 1);
  const auto tab = detail::ref_tables(vel.element, degree);
  const int nd = local_dof_count(vel.element);
  const int n = vel.n_dofs;
  std::vector<Triplet> trips;
  std::vector<std::array<double, 2>> pg(nd);
  for (int t = 0; t < vel.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*vel.mesh, t);
    const auto& dofs = vel.cell_to_global[t];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      const double w = tab.rule.points[q].weight * g.det;
      for (int i = 0; i < nd; ++i) pg[i] = detail::push_grad(g, tab.grads[q][i]);
      // div of the (a,i) basis field is the a-th gradient component of phi_i
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
              trips.emplace_back(a * n + dofs[i], b * n + dofs[j], w * pg[i][a] * pg[j][b]);
    }
  }
  return from_triplets(2 * n, 2 * n, trips);
}

/// Evaluate a component-blocked vector field at a barycentric point of cell t.
inline std::array<double, 2> eval_vector_field(const DiscreteField& f, int t,
                                               const std::vector<double>& basis_vals) {
  const auto& dofs = f.dofmap->cell_to_global[t];
  std::array<double, 2> out = {0.0, 0.0};
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    out[0] += f.at(0, dofs[i]) * basis_vals[i];
    out[1] += f.at(1, dofs[i]) * basis_vals[i];
  }
  return out;
}

/// Skew-symmetric convection operator for the form
/// b(u, w, v) = 1/2 ((u . grad w, v) - (u . grad v, w)) with v^T C w = b(u, w, v).
/// Skew symmetry holds by construction: the local matrix is antisymmetrized
/// before scatter. Works for scalar (b*) and per-component vector transport,
/// since the velocity form is component-diagonal.
inline SparseMatrix assemble_convection_skew(const DiscreteField& advecting,
                                             const DofMap& trial, const DofMap& test,
                                             int degree = -1) {
  if (advecting.dofmap == nullptr || advecting.components != 2)
    throw std::invalid_argument("assemble_convection_skew: advecting field must be a vector field");
  if (advecting.dofmap->mesh != trial.mesh || trial.mesh != test.mesh)
    throw std::invalid_argument("assemble_convection_skew: mesh mismatch");
  if (trial.element != test.element)
    throw std::invalid_argument("assemble_convection_skew: trial/test spaces must match");
  if (degree < 0)
    degree = polynomial_degree(advecting.dofmap->element) + polynomial_degree(trial.element) - 1 +
             polynomial_degree(test.element) + 1;  // one extra to stay exact for P2 advection
  const auto tab = detail::ref_tables(trial.element, degree);
  const auto atab = detail::ref_tables(advecting.dofmap->element, degree);
  const int nd = local_dof_count(trial.element);
  std::vector<Triplet> trips;
  std::vector<std::array<double, 2>> pg(nd);
  std::vector<double> local(nd * nd);
  for (int t = 0; t < trial.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*trial.mesh, t);
    const auto& dofs = trial.cell_to_global[t];
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      const double w = tab.rule.points[q].weight * g.det;
      const auto u = eval_vector_field(advecting, t, atab.values[q]);
      for (int i = 0; i < nd; ++i) pg[i] = detail::push_grad(g, tab.grads[q][i]);
      // a_ij = (u . grad phi_j, phi_i) on this cell
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          local[i * nd + j] +=
              w * tab.values[q][i] * (u[0] * pg[j][0] + u[1] * pg[j][1]);
    }
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        trips.emplace_back(dofs[i], dofs[j], 0.5 * (local[i * nd + j] - local[j * nd + i]));
  }
  return from_triplets(trial.n_dofs, trial.n_dofs, trips);
}

/// Buoyancy load: entries Ri * integral of theta * v_y (y-block only).
inline Vector assemble_buoyancy(const DiscreteField& theta, const DofMap& vel, double Ri,
                                int degree = -1) {
  if (theta.dofmap == nullptr || theta.dofmap->mesh != vel.mesh)
    throw std::invalid_argument("assemble_buoyancy: temperature on a different mesh");
  if (degree < 0)
    degree = polynomial_degree(theta.dofmap->element) + polynomial_degree(vel.element);
  const auto vt = detail::ref_tables(vel.element, degree);
  const auto tt = detail::ref_tables(theta.dofmap->element, degree);
  const int nd = local_dof_count(vel.element);
  const int n = vel.n_dofs;
  Vector out = Vector::Zero(2 * n);
  for (int t = 0; t < vel.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*vel.mesh, t);
    const auto& vdofs = vel.cell_to_global[t];
    const auto& tdofs = theta.dofmap->cell_to_global[t];
    for (std::size_t q = 0; q < vt.rule.points.size(); ++q) {
      double th = 0.0;
      for (std::size_t i = 0; i < tdofs.size(); ++i)
        th += theta.coefficients[tdofs[i]] * tt.values[q][i];
      const double w = Ri * th * vt.rule.points[q].weight * g.det;
      for (int i = 0; i < nd; ++i) out[n + vdofs[i]] += w * vt.values[q][i];
    }
  }
  return out;
}

/// Load vector (f, v) for a closed-form scalar field.
inline Vector assemble_load(const ScalarFunc& f, const DofMap& dm, int degree = 6) {
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  Vector out = Vector::Zero(dm.n_dofs);
  for (int t = 0; t < dm.mesh->num_triangles(); ++t) {
    const auto g = detail::cell_geom(*dm.mesh, t);
    const auto& dofs = dm.cell_to_global[t];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      const auto x = detail::physical_point(g, tab.rule.points[q].bary);
      const double w = f(x[0], x[1]) * tab.rule.points[q].weight * g.det;
      for (int i = 0; i < nd; ++i) out[dofs[i]] += w * tab.values[q][i];
    }
  }
  return out;
}

/// L2-orthogonal projection of a closed-form scalar field.
inline DiscreteField l2_project(const ScalarFunc& f, const DofMap& dm) {
  const SparseMatrix M = assemble_mass(dm);
  const Vector b = assemble_load(f, dm);
  auto [x, rep] = solve(M, b, 1e-12);
  DiscreteField out(dm, 1);
  for (int i = 0; i < dm.n_dofs; ++i) out.coefficients[i] = x[i];
  return out;
}

/// L2 projection of a closed-form 2-component field, component-blocked.
inline DiscreteField l2_project_vector(const ScalarFunc& fx, const ScalarFunc& fy,
                                       const DofMap& dm) {
  const SparseMatrix M = assemble_mass(dm);
  const LuOperator lu(M);
  DiscreteField out(dm, 2);
  auto [x0, r0] = lu.solve(assemble_load(fx, dm), 1e-12);
  auto [x1, r1] = lu.solve(assemble_load(fy, dm), 1e-12);
  for (int i = 0; i < dm.n_dofs; ++i) {
    out.at(0, i) = x0[i];
    out.at(1, i) = x1[i];
  }
  return out;
}

/// Dirichlet constraints by symmetric elimination: constrained rows become
/// identity rows carrying the prescribed value; columns are eliminated with
/// the matching right-hand-side correction, so SPD blocks stay SPD.
inline void apply_dirichlet(SparseMatrix& A, Vector& rhs, const std::vector<int>& dofs,
                            const std::vector<double>& values) {
  if (dofs.size() != values.size())
    throw std::invalid_argument("apply_dirichlet: dofs/values size mismatch");
  if (dofs.empty()) return;
  const int n = static_cast<int>(A.rows());
  std::vector<char> constrained(n, 0);
  Vector g = Vector::Zero(n);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const int d = dofs[k];
    if (d < 0 || d >= n) throw std::invalid_argument("apply_dirichlet: dof index out of range");
    if (constrained[d] && g[d] != values[k])
      throw std::invalid_argument("apply_dirichlet: conflicting values on dof " + std::to_string(d));
    constrained[d] = 1;
    g[d] = values[k];
  }
  rhs -= A * g;
  A.prune([&](int row, int col, double) { return !constrained[row] && !constrained[col]; });
  std::vector<Triplet> diag;
  for (int d = 0; d < n; ++d)
    if (constrained[d]) {
      diag.emplace_back(d, d, 1.0);
      rhs[d] = g[d];
    }
  SparseMatrix D(n, n);
  D.setFromTriplets(diag.begin(), diag.end());
  A += D;
  A.makeCompressed();
}

}  // namespace bouss
