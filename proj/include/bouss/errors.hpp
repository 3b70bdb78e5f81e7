/// @file errors.hpp
/// @brief Discrete space-time error norms against closed-form exact fields,
///        online accumulation, and convergence-rate fitting.
///
/// Norm conventions: |||v|||_{inf,k} = max_{1<=n<=N} ||v^n||_k and
/// |||v|||_{p,k} = (dt * sum_{n=0}^{N-1} ||v^n||_k^p)^{1/p}. Exact fields
/// are evaluated directly at quadrature points; no interpolation step is
/// inserted into the measured error.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bouss/assemble.hpp"
#include "bouss/manufactured.hpp"

namespace bouss {

/// L2 error of a component-blocked discrete vector field against exact
/// component functions at a fixed time.
inline double l2_error_vector(const Vector& coeffs, const DofMap& dm,
                              const TimeFunc& ex1, const TimeFunc& ex2, double t,
                              int degree = 6) {
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  const int n = dm.n_dofs;
  double acc = 0.0;
  for (int c = 0; c < dm.mesh->num_triangles(); ++c) {
    const auto g = detail::cell_geom(*dm.mesh, c);
    const auto& dofs = dm.cell_to_global[c];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      double vh1 = 0.0, vh2 = 0.0;
      for (int i = 0; i < nd; ++i) {
        vh1 += coeffs[dofs[i]] * tab.values[q][i];
        vh2 += coeffs[n + dofs[i]] * tab.values[q][i];
      }
      const auto x = detail::physical_point(g, tab.rule.points[q].bary);
      const double e1 = (ex1 ? ex1(x[0], x[1], t) : 0.0) - vh1;
      const double e2 = (ex2 ? ex2(x[0], x[1], t) : 0.0) - vh2;
      acc += tab.rule.points[q].weight * g.det * (e1 * e1 + e2 * e2);
    }
  }
  return std::sqrt(acc);
}

inline double l2_error_scalar(const Vector& coeffs, const DofMap& dm, const TimeFunc& exact,
                              double t, int degree = 6) {
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  double acc = 0.0;
  for (int c = 0; c < dm.mesh->num_triangles(); ++c) {
    const auto g = detail::cell_geom(*dm.mesh, c);
    const auto& dofs = dm.cell_to_global[c];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      double vh = 0.0;
      for (int i = 0; i < nd; ++i) vh += coeffs[dofs[i]] * tab.values[q][i];
      const auto x = detail::physical_point(g, tab.rule.points[q].bary);
      const double e = (exact ? exact(x[0], x[1], t) : 0.0) - vh;
      acc += tab.rule.points[q].weight * g.det * e * e;
    }
  }
  return std::sqrt(acc);
}

/// H1-seminorm error; exact gradient passed as (d1/dx, d1/dy, d2/dx, d2/dy).
inline double h1semi_error_vector(const Vector& coeffs, const DofMap& dm,
                                  const std::array<TimeFunc, 4>& exact_grad, double t,
                                  int degree = 6) {
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  const int n = dm.n_dofs;
  double acc = 0.0;
  std::vector<std::array<double, 2>> pg(nd);
  for (int c = 0; c < dm.mesh->num_triangles(); ++c) {
    const auto g = detail::cell_geom(*dm.mesh, c);
    const auto& dofs = dm.cell_to_global[c];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      for (int i = 0; i < nd; ++i) pg[i] = detail::push_grad(g, tab.grads[q][i]);
      double g11 = 0.0, g12 = 0.0, g21 = 0.0, g22 = 0.0;
      for (int i = 0; i < nd; ++i) {
        g11 += coeffs[dofs[i]] * pg[i][0];
        g12 += coeffs[dofs[i]] * pg[i][1];
        g21 += coeffs[n + dofs[i]] * pg[i][0];
        g22 += coeffs[n + dofs[i]] * pg[i][1];
      }
      const auto x = detail::physical_point(g, tab.rule.points[q].bary);
      const double e11 = (exact_grad[0] ? exact_grad[0](x[0], x[1], t) : 0.0) - g11;
      const double e12 = (exact_grad[1] ? exact_grad[1](x[0], x[1], t) : 0.0) - g12;
      const double e21 = (exact_grad[2] ? exact_grad[2](x[0], x[1], t) : 0.0) - g21;
      const double e22 = (exact_grad[3] ? exact_grad[3](x[0], x[1], t) : 0.0) - g22;
      acc += tab.rule.points[q].weight * g.det *
             (e11 * e11 + e12 * e12 + e21 * e21 + e22 * e22);
    }
  }
  return std::sqrt(acc);
}

/// ||div v_h||_L2 by a direct quadrature loop (independent of the assembled
/// grad-div operator).
inline double l2_divergence(const Vector& coeffs, const DofMap& dm, int degree = 4) {
  const auto tab = detail::ref_tables(dm.element, degree);
  const int nd = local_dof_count(dm.element);
  const int n = dm.n_dofs;
  double acc = 0.0;
  std::vector<std::array<double, 2>> pg(nd);
  for (int c = 0; c < dm.mesh->num_triangles(); ++c) {
    const auto g = detail::cell_geom(*dm.mesh, c);
    const auto& dofs = dm.cell_to_global[c];
    for (std::size_t q = 0; q < tab.rule.points.size(); ++q) {
      for (int i = 0; i < nd; ++i) pg[i] = detail::push_grad(g, tab.grads[q][i]);
      double div = 0.0;
      for (int i = 0; i < nd; ++i)
        div += coeffs[dofs[i]] * pg[i][0] + coeffs[n + dofs[i]] * pg[i][1];
      acc += tab.rule.points[q].weight * g.det * div * div;
    }
  }
  return std::sqrt(acc);
}

/// Online accumulator for the table norms. Call observe() at every time
/// level n = 0..N; the index conventions of the discrete norms (max over
/// 1..N, quadrature sums over 0..N-1) are handled here. The Step-1 field
/// u~ at level 0 is taken to be the projected initial velocity.
class SpaceTimeErrorAccumulator {
 public:
  SpaceTimeErrorAccumulator(const ManufacturedSolution& ms, double dt, int num_steps)
      : ms_(ms), dt_(dt), N_(num_steps) {}

  void observe(int n, const Vector& u, const Vector& u_tilde, const Vector& theta,
               const DofMap& vel, const DofMap& temp) {
    const double t = n * dt_;
    const TimeFunc ex1 = [this](double x, double y, double tt) { return ms_.u1(x, y, tt); };
    const TimeFunc ex2 = [this](double x, double y, double tt) { return ms_.u2(x, y, tt); };
    const double div = l2_divergence(u, vel);
    if (n >= 1) {
      max_u_err_ = std::max(max_u_err_, l2_error_vector(u, vel, ex1, ex2, t));
      max_div_ = std::max(max_div_, div);
      max_theta_err_ = std::max(
          max_theta_err_,
          l2_error_scalar(theta, temp,
                          [this](double x, double y, double tt) { return ms_.theta(x, y, tt); },
                          t));
    }
    if (n <= N_ - 1) {
      sum_div2_ += div * div;
      const std::array<TimeFunc, 4> eg = {
          TimeFunc{},  // u1_x = 0
          [this](double x, double y, double tt) { return ms_.du1_dy(x, y, tt); },
          [this](double x, double y, double tt) { return ms_.du2_dx(x, y, tt); },
          TimeFunc{}};  // u2_y = 0
      const double ge = h1semi_error_vector(u_tilde, vel, eg, t);
      sum_grad_err2_ += ge * ge;
      const double gu = h1semi_error_vector(u, vel, eg, t);
      sum_grad_err_corrected2_ += gu * gu;
    }
    if (n == N_) final_div_ = div;
  }

  double u_linf_l2() const { return max_u_err_; }              // |||u - u_h|||_{inf,0}
  double div_linf() const { return max_div_; }                 // |||div(u - u_h)|||_{inf,0}
  double div_l2() const { return std::sqrt(dt_ * sum_div2_); } // |||div(u - u_h)|||_{2,0}
  double grad_utilde_l2() const { return std::sqrt(dt_ * sum_grad_err2_); }
  double grad_u_l2() const { return std::sqrt(dt_ * sum_grad_err_corrected2_); }
  double theta_linf_l2() const { return max_theta_err_; }
  double final_div() const { return final_div_; }

 private:
  ManufacturedSolution ms_;
  double dt_;
  int N_;
  double max_u_err_ = 0.0, max_div_ = 0.0, max_theta_err_ = 0.0;
  double sum_div2_ = 0.0, sum_grad_err2_ = 0.0, sum_grad_err_corrected2_ = 0.0;
  double final_div_ = 0.0;
};

/// rate_i = log2(e_i / e_{i+1}) for a parameter-halving sequence.
inline std::vector<double> fit_rates(const std::vector<double>& errors) {
  if (errors.size() < 2)
    throw std::invalid_argument("fit_rates: need at least two rows");
  std::vector<double> rates;
  rates.reserve(errors.size() - 1);
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0))
      throw std::invalid_argument("fit_rates: errors must be positive");
    rates.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return rates;
}

}  // namespace bouss
