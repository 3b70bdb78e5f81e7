/// @file element.hpp
/// @brief Lagrange reference elements on the triangle: P0, P1, P2.
#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace bouss {

enum class ElementKind { P0, P1, P2 };

inline int local_dof_count(ElementKind e) {
  switch (e) {
    case ElementKind::P0: return 1;
    case ElementKind::P1: return 3;
    case ElementKind::P2: return 6;
  }
  return 0;
}

inline int polynomial_degree(ElementKind e) {
  switch (e) {
    case ElementKind::P0: return 0;
    case ElementKind::P1: return 1;
    case ElementKind::P2: return 2;
  }
  return 0;
}

/// Basis values at a barycentric point. P2 ordering: 3 vertex dofs then
/// edge midpoints opposite to the (0,1), (1,2), (2,0) edges in that order.
inline void basis_values(ElementKind e, const std::array<double, 3>& L,
                         double* out) {
  switch (e) {
    case ElementKind::P0:
      out[0] = 1.0;
      return;
    case ElementKind::P1:
      out[0] = L[0];
      out[1] = L[1];
      out[2] = L[2];
      return;
    case ElementKind::P2:
      for (int i = 0; i < 3; ++i) out[i] = L[i] * (2.0 * L[i] - 1.0);
      out[3] = 4.0 * L[0] * L[1];
      out[4] = 4.0 * L[1] * L[2];
      out[5] = 4.0 * L[2] * L[0];
      return;
  }
}

/// Reference-coordinate gradients (d/dx, d/dy with L = (1-x-y, x, y)).
inline void basis_gradients(ElementKind e, const std::array<double, 3>& L,
                            std::array<double, 2>* out) {
  static constexpr std::array<std::array<double, 2>, 3> dL = {
      {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  switch (e) {
    case ElementKind::P0:
      out[0] = {0.0, 0.0};
      return;
    case ElementKind::P1:
      for (int i = 0; i < 3; ++i) out[i] = dL[i];
      return;
    case ElementKind::P2: {
      for (int i = 0; i < 3; ++i) {
        const double c = 4.0 * L[i] - 1.0;
        out[i] = {c * dL[i][0], c * dL[i][1]};
      }
      auto edge = [&](int a, int b) -> std::array<double, 2> {
        return {4.0 * (L[a] * dL[b][0] + L[b] * dL[a][0]),
                4.0 * (L[a] * dL[b][1] + L[b] * dL[a][1])};
      };
      out[3] = edge(0, 1);
      out[4] = edge(1, 2);
      out[5] = edge(2, 0);
      return;
    }
  }
}

}  // namespace bouss
