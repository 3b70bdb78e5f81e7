/// @file quadrature.hpp
/// @brief Quadrature on the reference triangle {x,y >= 0, x+y <= 1}.
///
/// Rules are built from tensor Gauss-Legendre points under the Duffy
/// transform x = xi, y = eta*(1-xi); the Jacobian (1-xi) raises the
/// xi-degree of the integrand by one, which the point count accounts for.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bouss {

struct QuadraturePoint {
  std::array<double, 3> bary;  // (1-x-y, x, y)
  double weight;               // weights sum to the reference area 1/2
};

struct QuadratureRule {
  int degree = 0;
  std::vector<QuadraturePoint> points;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
inline void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess on [-1,1]
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      // evaluate P_n(t) and P'_n(t) by recurrence
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);  // includes the [0,1] rescale
  }
}

}  // namespace detail

/// Rule exact for all bivariate polynomials up to the requested degree.
inline QuadratureRule quadrature_rule(int degree) {
  if (degree < 1 || degree > 7)
    throw std::invalid_argument("quadrature_rule: degree must be in [1,7]");
  // n-point Gauss is exact to 2n-1; the Duffy Jacobian adds one degree in xi.
  const int n = (degree + 3) / 2;
  std::vector<double> gx, gw;
  detail::gauss_legendre_unit(n, gx, gw);

  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = gx[i];
      const double y = gx[j] * (1.0 - gx[i]);
      const double w = gw[i] * gw[j] * (1.0 - gx[i]);
      rule.points.push_back({{1.0 - x - y, x, y}, w});
    }
  return rule;
}

}  // namespace bouss
