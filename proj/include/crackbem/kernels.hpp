#pragma once

// Fundamental solution of the 2D Navier system, the conormal (traction)
// operator, and the kernels derived from them. Every function takes raw
// points so the same code serves boundary, crack and interior evaluation.

#include <array>
#include <cmath>
#include <functional>

#include "crackbem/errors.hpp"
#include "crackbem/linalg2.hpp"
#include "crackbem/material.hpp"

namespace crackbem {

namespace detail {

inline double checked_r2(const Vec2& d, const char* what) {
  const double r2 = norm2(d);
  if (!(r2 > 0.0)) throw DomainError(std::string(what) + ": coincident points");
  return r2;
}

inline void require_unit(const Vec2& n, const char* what) {
  if (std::abs(norm(n) - 1.0) > 1e-12) throw DomainError(std::string(what) + ": normal is not a unit vector");
}

}  // namespace detail

/// Kelvin matrix Phi(dx) with L Phi = delta I, L = mu Laplace + (lambda+mu) grad div.
inline Matrix2 kelvin_matrix(const Vec2& dx, const LameParams& mat) {
  const double r2 = detail::checked_r2(dx, "kelvin_matrix");
  const double ca = mat.kelvin_a() / (2.0 * pi) * 0.5 * std::log(r2);
  const double cb = mat.kelvin_b() / (2.0 * pi) / r2;
  const double off = -cb * dx.x * dx.y;
  return Matrix2::from_rows(ca - cb * dx.x * dx.x, off, off, ca - cb * dx.y * dx.y);
}

/// Partial derivatives d/d(dx_m) of the Kelvin matrix, m = 0, 1.
inline std::array<Matrix2, 2> kelvin_gradient(const Vec2& dx, const LameParams& mat) {
  const double r2 = detail::checked_r2(dx, "kelvin_gradient");
  const double ca = mat.kelvin_a() / (2.0 * pi);
  const double cb = mat.kelvin_b() / (2.0 * pi);
  std::array<Matrix2, 2> g;
  for (int m = 0; m < 2; ++m) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double dij = i == j ? 1.0 : 0.0;
        const double dim = i == m ? 1.0 : 0.0;
        const double djm = j == m ? 1.0 : 0.0;
        g[m](i, j) = ca * dij * dx[m] / r2 -
                     cb * ((dim * dx[j] + dx[i] * djm) / r2 - 2.0 * dx[i] * dx[j] * dx[m] / (r2 * r2));
      }
    }
  }
  return g;
}

/// Symbol matrix T(xi) of the conormal derivative for the unit normal n:
/// T(d/dx) u = sigma(u) n.
inline Matrix2 traction_operator(const Vec2& n, const Vec2& xi, const LameParams& mat) {
  detail::require_unit(n, "traction_operator");
  const double l = mat.lambda(), mu = mat.mu(), l2m = l + 2.0 * mu;
  return Matrix2::from_rows(l2m * n.x * xi.x + mu * n.y * xi.y, mu * n.y * xi.x + l * n.x * xi.y,
                            l * n.y * xi.x + mu * n.x * xi.y, mu * n.x * xi.x + l2m * n.y * xi.y);
}

/// Traction sigma(u) n from the displacement gradient grad(i,j) = du_i/dx_j.
inline Vec2 conormal_derivative(const Matrix2& grad_u, const Vec2& n, const LameParams& mat) {
  return stress_from_gradient(grad_u, mat) * n;
}

/// Double-layer traction kernel dPhi/dnu_y (x - y) for the normal n at y.
/// Entry (k, j): j-th traction component of the k-th Kelvin column.
inline Matrix2 dlp_traction_kernel(const Vec2& x, const Vec2& y, const Vec2& n, const LameParams& mat) {
  const Vec2 d = x - y;
  const double r2 = detail::checked_r2(d, "dlp_traction_kernel");
  const double a = mat.dlp_a(), b = mat.dlp_b();
  const double nd = dot(n, d) / r2;
  Matrix2 k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double dij = i == j ? 1.0 : 0.0;
      k(i, j) = (a * dij + b * d[i] * d[j] / r2) * nd - a * (n[j] * d[i] - n[i] * d[j]) / r2;
    }
  }
  return k;
}

/// Partial derivatives d/dx_m of the double-layer traction kernel, m = 0, 1.
inline std::array<Matrix2, 2> dlp_traction_kernel_gradient(const Vec2& x, const Vec2& y, const Vec2& n,
                                                          const LameParams& mat) {
  const Vec2 d = x - y;
  const double r2 = detail::checked_r2(d, "dlp_traction_kernel_gradient");
  const double r4 = r2 * r2;
  const double a = mat.dlp_a(), b = mat.dlp_b();
  const double nd = dot(n, d);
  std::array<Matrix2, 2> g;
  for (int m = 0; m < 2; ++m) {
    const double dnd = n[m] / r2 - 2.0 * nd * d[m] / r4;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double dij = i == j ? 1.0 : 0.0;
        const double dim = i == m ? 1.0 : 0.0;
        const double djm = j == m ? 1.0 : 0.0;
        const double dyad = d[i] * d[j] / r2;
        const double ddyad = (dim * d[j] + d[i] * djm) / r2 - 2.0 * d[i] * d[j] * d[m] / r4;
        const double skew = n[j] * d[i] - n[i] * d[j];
        const double dskew = (n[j] * dim - n[i] * djm) / r2 - 2.0 * skew * d[m] / r4;
        g[m](i, j) = b * ddyad * nd / r2 + (a * dij + b * dyad) * dnd - a * dskew;
      }
    }
  }
  return g;
}

/// Hypersingular kernel on a straight crack in its own frame (crack on the
/// x1-axis, normal (0,1)): -E / (4 pi (x1 - y1)^2) I.
inline Matrix2 hypersingular_kernel_canonical(double x1, double y1, const LameParams& mat) {
  const double s = x1 - y1;
  if (!(s != 0.0)) throw DomainError("hypersingular_kernel_canonical: coincident abscissae");
  const double w = -mat.young() / (4.0 * pi * s * s);
  return Matrix2::diag(w, w);
}

/// Generators of the rigid motions: (1,0), (0,1), (y,-x).
struct RigidMotion {
  int index = 0;

  Vec2 operator()(const Vec2& p) const {
    switch (index) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      default: return {p.y, -p.x};
    }
  }

  /// grad(i,j) = d psi_i / dx_j; antisymmetric for every generator.
  Matrix2 gradient() const {
    return index == 2 ? Matrix2::from_rows(0.0, 1.0, -1.0, 0.0) : Matrix2::zero();
  }
};

inline std::array<RigidMotion, 3> rigid_motion_basis() { return {RigidMotion{0}, RigidMotion{1}, RigidMotion{2}}; }

}  // namespace crackbem
