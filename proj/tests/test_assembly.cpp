#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bouss/assemble.hpp"
#include "bouss/errors.hpp"

using namespace bouss;

namespace {

Mesh unit_square(int n) { return build_rect_mesh({0, 1, 0, 1, n, n}); }

// single CCW triangle with prescribed vertices
Mesh one_triangle(std::array<double, 2> a, std::array<double, 2> b, std::array<double, 2> c) {
  Mesh m;
  m.vertices = {a, b, c};
  m.triangles = {{0, 1, 2}};
  m.h = longest_edge(m, 0);
  return m;
}

double dense_entry(const SparseMatrix& A, int i, int j) { return A.coeff(i, j); }

}  // namespace

TEST_CASE("P1 mass matrix on a single triangle matches the closed form") {
  // (area/12) * [[2,1,1],[1,2,1],[1,1,2]] for any triangle
  const Mesh m = one_triangle({0.2, 0.1}, {1.3, 0.4}, {0.5, 1.7});
  const double area = signed_area(m, 0);
  const DofMap dm = build_dofmap(m, ElementKind::P1);
  const SparseMatrix M = assemble_mass(dm);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expect = area / 12.0 * (i == j ? 2.0 : 1.0);
      CHECK(dense_entry(M, i, j) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("P1 stiffness on the unit right triangle matches the closed form") {
  // grad basis: (-1,-1), (1,0), (0,1); K = 0.5*[[2,-1,-1],[-1,1,0],[-1,0,1]]
  const Mesh m = one_triangle({0, 0}, {1, 0}, {0, 1});
  const DofMap dm = build_dofmap(m, ElementKind::P1);
  const SparseMatrix K = assemble_stiffness(dm, 1.0);
  const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(dense_entry(K, i, j) == doctest::Approx(expect[i][j]).epsilon(1e-14));
}

TEST_CASE("mass partition of unity and stiffness null space") {
  for (ElementKind e : {ElementKind::P1, ElementKind::P2}) {
    const Mesh m = unit_square(4);
    const DofMap dm = build_dofmap(m, e);
    const SparseMatrix M = assemble_mass(dm);
    const SparseMatrix K = assemble_stiffness(dm, 3.5);
    const Vector ones = Vector::Ones(dm.n_dofs);
    CHECK(ones.dot(M * ones) == doctest::Approx(1.0).epsilon(1e-13));  // domain area
    CHECK((K * ones).lpNorm<Eigen::Infinity>() < 1e-13);               // constants
    // row sums of M are the basis integrals
    const Vector load = assemble_load([](double, double) { return 1.0; }, dm);
    CHECK((M * ones - load).lpNorm<Eigen::Infinity>() < 1e-13);
  }
}

TEST_CASE("stiffness scales linearly in its coefficient and rejects nonpositive ones") {
  const Mesh m = unit_square(2);
  const DofMap dm = build_dofmap(m, ElementKind::P2);
  const SparseMatrix K1 = assemble_stiffness(dm, 1.0);
  const SparseMatrix K4 = assemble_stiffness(dm, 4.0);
  CHECK((SparseMatrix(K4 - 4.0 * K1)).coeffs().cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(assemble_stiffness(dm, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_stiffness(dm, -1.0), std::invalid_argument);
}

TEST_CASE("divergence pairing against hand-computable fields") {
  const Mesh m = unit_square(3);
  const DofMap vel = build_dofmap(m, ElementKind::P2);
  for (ElementKind pe : {ElementKind::P1, ElementKind::P0}) {
    const DofMap pres = build_dofmap(m, pe);
    const SparseMatrix B = assemble_divergence(vel, pres);
    REQUIRE(B.rows() == pres.n_dofs);
    REQUIRE(B.cols() == 2 * vel.n_dofs);

    // constant field: div = 0
    Vector uc = Vector::Zero(2 * vel.n_dofs);
    uc.head(vel.n_dofs).setConstant(2.0);
    uc.tail(vel.n_dofs).setConstant(-3.0);
    CHECK((B * uc).lpNorm<Eigen::Infinity>() < 1e-13);

    // u = (x, 0): div = 1, so (B u)_q = integral of q
    Vector ux = Vector::Zero(2 * vel.n_dofs);
    for (int d = 0; d < vel.n_dofs; ++d) ux[d] = vel.dof_coords[d][0];
    const Vector qint = assemble_load([](double, double) { return 1.0; }, pres);
    CHECK((B * ux - qint).lpNorm<Eigen::Infinity>() < 1e-13);
  }
}

TEST_CASE("grad-div operator: symmetry, rigid rotation, and a known quadratic form") {
  const Mesh m = unit_square(4);
  const DofMap vel = build_dofmap(m, ElementKind::P2);
  const SparseMatrix G = assemble_graddiv(vel);
  CHECK((SparseMatrix(SparseMatrix(G.transpose()) - G)).coeffs().cwiseAbs().maxCoeff() < 1e-13);

  const int n = vel.n_dofs;
  // rigid rotation (-y, x) is divergence-free and exactly representable
  Vector rot = Vector::Zero(2 * n);
  for (int d = 0; d < n; ++d) {
    rot[d] = -vel.dof_coords[d][1];
    rot[n + d] = vel.dof_coords[d][0];
  }
  CHECK(std::abs(rot.dot(G * rot)) < 1e-13);

  // u = (x, y): div = 2, u^T G u = 4 * area
  Vector lin = Vector::Zero(2 * n);
  for (int d = 0; d < n; ++d) {
    lin[d] = vel.dof_coords[d][0];
    lin[n + d] = vel.dof_coords[d][1];
  }
  CHECK(lin.dot(G * lin) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("grad-div quadratic form agrees with the direct divergence norm") {
  const Mesh m = unit_square(4);
  const DofMap vel = build_dofmap(m, ElementKind::P2);
  const SparseMatrix G = assemble_graddiv(vel);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Vector u(2 * vel.n_dofs);
    for (int i = 0; i < u.size(); ++i) u[i] = unif(rng);
    const double via_matrix = std::sqrt(u.dot(G * u));
    const double via_quadrature = l2_divergence(u, vel);
    CHECK(via_matrix == doctest::Approx(via_quadrature).epsilon(1e-12));
  }
}

TEST_CASE("skew convection: antisymmetry, zero advecting field, and a hand value") {
  const Mesh m = unit_square(3);
  const DofMap vel = build_dofmap(m, ElementKind::P2);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  DiscreteField adv(vel, 2);
  for (auto& c : adv.coefficients) c = unif(rng);
  const SparseMatrix C = assemble_convection_skew(adv, vel, vel);
  const SparseMatrix S = SparseMatrix(C.transpose()) + C;
  const double cmax = C.coeffs().cwiseAbs().maxCoeff();
  CHECK(S.coeffs().cwiseAbs().maxCoeff() <= 1e-13 * cmax);

  DiscreteField zero(vel, 2);
  CHECK(assemble_convection_skew(zero, vel, vel).nonZeros() == 0);

  // constant advection u=(1,0) on one reference triangle, P1 spaces:
  // v^T C w = 0.5*((dw/dx, v) - (dv/dx, w)); w=x, v=y gives 0.5*int y = 1/12
  const Mesh tri = one_triangle({0, 0}, {1, 0}, {0, 1});
  const DofMap p1 = build_dofmap(tri, ElementKind::P1);
  const DofMap p2 = build_dofmap(tri, ElementKind::P2);
  DiscreteField one_x(p2, 2);
  for (int d = 0; d < p2.n_dofs; ++d) one_x.at(0, d) = 1.0;
  const SparseMatrix C1 = assemble_convection_skew(one_x, p1, p1);
  Vector w(3), v(3);
  for (int d = 0; d < 3; ++d) {
    w[d] = p1.dof_coords[d][0];
    v[d] = p1.dof_coords[d][1];
  }
  CHECK(v.dot(C1 * w) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("skew convection input validation") {
  const Mesh m = unit_square(2);
  const DofMap vel = build_dofmap(m, ElementKind::P2);
  DiscreteField scalar(vel, 1);
  CHECK_THROWS_AS(assemble_convection_skew(scalar, vel, vel), std::invalid_argument);
  const Mesh m2 = unit_square(3);
  const DofMap other = build_dofmap(m2, ElementKind::P2);
  DiscreteField adv(vel, 2);
  CHECK_THROWS_AS(assemble_convection_skew(adv, other, other), std::invalid_argument);
}

TEST_CASE("buoyancy load: Ri scaling, unit temperature, x-block empty") {
  const Mesh m = unit_square(3);
  const DofMap vel = build_dofmap(m, ElementKind::P2);
  const DofMap temp = build_dofmap(m, ElementKind::P2);
  DiscreteField th(temp, 1);
  for (auto& c : th.coefficients) c = 1.0;

  const Vector b0 = assemble_buoyancy(th, vel, 0.0);
  CHECK(b0.lpNorm<Eigen::Infinity>() == 0.0);

  const double Ri = 2.5;
  const Vector b = assemble_buoyancy(th, vel, Ri);
  CHECK(b.head(vel.n_dofs).lpNorm<Eigen::Infinity>() == 0.0);
  // theta == 1: y-block is Ri * (1, v) = Ri * scalar load of 1
  const Vector load1 = assemble_load([](double, double) { return 1.0; }, vel);
  CHECK((b.tail(vel.n_dofs) - Ri * load1).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("L2 projection reproduces members of the space exactly") {
  const Mesh m = unit_square(3);
  const DofMap dm = build_dofmap(m, ElementKind::P2);
  const DiscreteField pr =
      l2_project([](double x, double y) { return 1.0 + 2.0 * x - y + x * y + x * x; }, dm);
  for (int d = 0; d < dm.n_dofs; ++d) {
    const auto& x = dm.dof_coords[d];
    const double exact = 1.0 + 2.0 * x[0] - x[1] + x[0] * x[1] + x[0] * x[0];
    CHECK(pr.coefficients[d] == doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("vector projection error on the 4x4 mesh matches an independent oracle") {
  // reference value computed with a separately written numpy implementation
  // of the same projection (12x12 Duffy points, dense solve)
  const Mesh m = unit_square(4);
  const DofMap dm = build_dofmap(m, ElementKind::P2);
  const DiscreteField pr = l2_project_vector(
      [](double, double y) { return std::cos(M_PI * y); },
      [](double x, double) { return std::sin(M_PI * x); }, dm);
  Vector u(2 * dm.n_dofs);
  for (int i = 0; i < u.size(); ++i) u[i] = pr.coefficients[i];
  const double err = l2_error_vector(
      u, dm, [](double, double y, double) { return std::cos(M_PI * y); },
      [](double x, double, double) { return std::sin(M_PI * x); }, 0.0);
  CHECK(err == doctest::Approx(2.184488150368601e-3).epsilon(1e-6));
}

TEST_CASE("scalar projection error converges at third order") {
  std::vector<double> errs;
  for (int n : {8, 16, 32}) {
    const Mesh m = unit_square(n);
    const DofMap dm = build_dofmap(m, ElementKind::P2);
    const DiscreteField pr = l2_project([](double x, double y) { return std::sin(M_PI * x) * y; }, dm);
    Vector c(dm.n_dofs);
    for (int i = 0; i < dm.n_dofs; ++i) c[i] = pr.coefficients[i];
    errs.push_back(l2_error_scalar(
        c, dm, [](double x, double y, double) { return std::sin(M_PI * x) * y; }, 0.0));
  }
  // the coarsest pair is still preasymptotic; gate the finest one
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(3.0).epsilon(0.03));
  CHECK(errs[2] < errs[1]);
  CHECK(errs[1] < errs[0]);
}

TEST_CASE("load assembly is linear in the integrand") {
  const Mesh m = unit_square(3);
  const DofMap dm = build_dofmap(m, ElementKind::P2);
  const auto f = [](double x, double y) { return std::sin(x) * y; };
  const auto g = [](double x, double y) { return std::exp(x - y); };
  const Vector lf = assemble_load(f, dm);
  const Vector lg = assemble_load(g, dm);
  const Vector lfg = assemble_load([&](double x, double y) { return 2.0 * f(x, y) - g(x, y); }, dm);
  CHECK((lfg - (2.0 * lf - lg)).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("assembly is independent of excess quadrature degree") {
  const Mesh m = unit_square(3);
  const DofMap dm = build_dofmap(m, ElementKind::P2);
  const SparseMatrix M4 = assemble_mass(dm, 4);
  const SparseMatrix M7 = assemble_mass(dm, 7);
  CHECK((SparseMatrix(M7 - M4)).coeffs().cwiseAbs().maxCoeff() < 1e-14);
  const SparseMatrix K2 = assemble_stiffness(dm, 1.0, 2);
  const SparseMatrix K6 = assemble_stiffness(dm, 1.0, 6);
  CHECK((SparseMatrix(K6 - K2)).coeffs().cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Dirichlet elimination on a hand-sized SPD system") {
  // A = [[2,1],[1,3]], rhs = [1,2], constrain x0 = 5
  std::vector<Triplet> trips = {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
  SparseMatrix A = from_triplets(2, 2, trips);
  Vector rhs(2);
  rhs << 1.0, 2.0;
  apply_dirichlet(A, rhs, {0}, {5.0});
  CHECK(dense_entry(A, 0, 0) == doctest::Approx(1.0));
  CHECK(dense_entry(A, 0, 1) == doctest::Approx(0.0));
  CHECK(dense_entry(A, 1, 0) == doctest::Approx(0.0));
  CHECK(dense_entry(A, 1, 1) == doctest::Approx(3.0));
  CHECK(rhs[0] == doctest::Approx(5.0));
  CHECK(rhs[1] == doctest::Approx(2.0 - 5.0));  // rhs correction carries A10 * g
  auto [x, rep] = solve(A, rhs);
  CHECK(x[0] == doctest::Approx(5.0));
  CHECK(x[1] == doctest::Approx(-1.0));
}

TEST_CASE("Dirichlet elimination rejects conflicts and bad indices") {
  std::vector<Triplet> trips = {{0, 0, 1.0}, {1, 1, 1.0}};
  SparseMatrix A = from_triplets(2, 2, trips);
  Vector rhs = Vector::Zero(2);
  CHECK_THROWS_AS(apply_dirichlet(A, rhs, {0, 0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_dirichlet(A, rhs, {7}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_dirichlet(A, rhs, {0}, {1.0, 2.0}), std::invalid_argument);
  // same value twice is allowed
  apply_dirichlet(A, rhs, {0, 0}, {3.0, 3.0});
  CHECK(rhs[0] == doctest::Approx(3.0));
}

TEST_CASE("Dirichlet elimination preserves the solution of a boundary value problem") {
  // -lap(u) = 0 with u = x on the boundary has exact P1 solution u = x
  const Mesh m = unit_square(4);
  const DofMap dm = build_dofmap(m, ElementKind::P1);
  SparseMatrix K = assemble_stiffness(dm, 1.0);
  Vector rhs = Vector::Zero(dm.n_dofs);
  std::vector<int> bdofs = all_boundary_dofs(dm);
  std::vector<double> vals;
  for (int d : bdofs) vals.push_back(dm.dof_coords[d][0]);
  apply_dirichlet(K, rhs, bdofs, vals);
  auto [x, rep] = solve(K, rhs);
  for (int d = 0; d < dm.n_dofs; ++d)
    CHECK(x[d] == doctest::Approx(dm.dof_coords[d][0]).epsilon(1e-11));
}

TEST_CASE("degenerate cells are rejected at assembly time") {
  Mesh m = unit_square(1);
  m.vertices[2] = m.vertices[1];  // collapse one triangle
  const DofMap dm = build_dofmap(m, ElementKind::P1);
  CHECK_THROWS_AS(assemble_mass(dm), std::invalid_argument);
}
