#pragma once

// Straight Neumann (traction-free) crack inside the domain: geometry, the
// coupled crack/boundary solve, and reconstruction of the crack opening.
//
// On the crack, with X in (-1,1) the scaled abscissa and psi(X) = (2/eps) phi(eps X / 2),
//   A[psi](X) = -(4/E) f(eps X / 2),
//   f = traction of u0 + traction of D[w]     (normal e_perp),
// and on the boundary (-1/2 I + K) w = D_crack[phi]. The two are coupled by a
// fixed-point iteration whose contraction factor is O(eps^2).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "crackbem/bem.hpp"
#include "crackbem/errors.hpp"
#include "crackbem/finite_hilbert.hpp"
#include "crackbem/kernels.hpp"
#include "crackbem/linalg2.hpp"

namespace crackbem {

/// Line crack {z + s e : |s| <= eps/2} with unit normal e_perp = rot90(e).
class CrackSegment {
 public:
  /// `angle` is the direction of the tangent e in radians.
  CrackSegment(Vec2 center, double angle, double length)
      : CrackSegment(center, Vec2{std::cos(angle), std::sin(angle)}, length) {}

  CrackSegment(Vec2 center, Vec2 tangent, double length) : z_(center), length_(length) {
    const double t = norm(tangent);
    if (!(t > 0.0)) throw InvalidArgument("CrackSegment: zero tangent");
    if (!(length > 0.0)) throw InvalidArgument("CrackSegment: length must be positive");
    e_ = tangent / t;
    e_perp_ = rot90(e_);
  }

  const Vec2& center() const { return z_; }
  const Vec2& tangent() const { return e_; }
  const Vec2& normal() const { return e_perp_; }
  double length() const { return length_; }
  double angle() const { return std::atan2(e_.y, e_.x); }

  /// Point at scaled abscissa X in [-1, 1].
  Vec2 point(double scaled) const { return z_ + (0.5 * length_ * scaled) * e_; }

  /// Same segment traversed the other way; the normal flips sign.
  CrackSegment reversed() const { return CrackSegment(z_, -e_, length_); }
  CrackSegment with_length(double length) const { return CrackSegment(z_, e_, length); }

 private:
  Vec2 z_;
  Vec2 e_;
  Vec2 e_perp_;
  double length_;
};

/// Rigid frame with the crack center at the origin and the tangent along (1, 0).
inline Vec2 map_to_canonical(const CrackSegment& crack, const Vec2& p) {
  const Vec2 d = p - crack.center();
  return {dot(d, crack.tangent()), dot(d, crack.normal())};
}

inline Vec2 map_from_canonical(const CrackSegment& crack, const Vec2& q) {
  return crack.center() + q.x * crack.tangent() + q.y * crack.normal();
}

/// Vectors transform by the rotation only.
inline Vec2 vector_to_canonical(const CrackSegment& crack, const Vec2& v) {
  return {dot(v, crack.tangent()), dot(v, crack.normal())};
}

inline Vec2 vector_from_canonical(const CrackSegment& crack, const Vec2& v) {
  return v.x * crack.tangent() + v.y * crack.normal();
}

/// Right-hand side f(eps X / 2) of the crack equation: traction (normal e_perp)
/// of u0 plus traction of the double layer of the boundary perturbation w.
inline Vec2 crack_rhs(const RepresentationEvaluator& u0, const BoundaryField& w, const CrackSegment& crack,
                      double scaled) {
  if (std::abs(scaled) > 1.0) throw DomainError("crack_rhs: |x| > 1");
  const Vec2 p = crack.point(scaled);
  const auto& mat = u0.material();
  const Eigen::MatrixXd row = dlp_traction_row(*u0.mesh(), mat, p, crack.normal());
  const Eigen::Vector2d tw = row * to_vector(w);
  return u0.traction(p, crack.normal()) + Vec2{tw(0), tw(1)};
}

struct CrackSolveOptions {
  int n_modes = 32;         ///< Chebyshev modes (and crack quadrature nodes).
  double tol = 1e-11;       ///< Sup-norm tolerance on successive w updates.
  int max_iterations = 50;  ///< Picard iterations before the direct fallback.
  bool allow_direct_fallback = true;
};

struct CrackSolveDiagnostics {
  int iterations = 0;
  std::vector<double> update_norms;  ///< sup |w_k - w_{k-1}| per iteration.
  double boundary_residual = 0.0;    ///< Relative residual of the last boundary solve.
  double crack_residual = 0.0;       ///< sup |A[psi] + (4/E) f(w)| at the crack nodes.
  bool used_direct_fallback = false;
};

/// Converged coupled solution.
struct CrackedSolution {
  std::shared_ptr<const NeumannEvaluator> operator_;
  std::shared_ptr<const BackgroundSolution> background;
  CrackSegment crack;
  VectorDensity density;   ///< psi in global vector components.
  BoundaryField w;         ///< u_eps - u0 on the boundary (rigid-motion orthogonal).
  CrackSolveDiagnostics diagnostics;

  BoundaryField u0_trace() const { return background->trace; }
  BoundaryField u_eps_trace() const { return background->trace + w; }
};

namespace detail {

/// Precomputed linear maps between boundary and crack node values.
struct CrackCoupling {
  ChebyshevURule rule;
  std::vector<Vec2> points;
  std::vector<Vec2> u0_traction;    ///< Traction of u0 at crack nodes.
  Eigen::MatrixXd dlp_traction;     ///< (2m x 2N): w -> traction of D[w] at crack nodes.
  Eigen::MatrixXd crack_to_boundary;  ///< (2N x 2m): smooth density values -> D_crack[phi] at nodes.

  CrackCoupling(const NeumannEvaluator& op, const BackgroundSolution& bg, const CrackSegment& crack, int m)
      : rule(m), points(m), u0_traction(m) {
    const auto& mesh = *op.mesh();
    const auto& mat = op.material();
    const int n = mesh.size();
    dlp_traction.resize(2 * m, 2 * n);
    crack_to_boundary.resize(2 * n, 2 * m);
    const double eps = crack.length();
    for (int k = 0; k < m; ++k) {
      points[k] = crack.point(rule.nodes[k]);
      u0_traction[k] = bg.evaluator.traction(points[k], crack.normal());
      dlp_traction.middleRows(2 * k, 2) = dlp_traction_row(mesh, mat, points[k], crack.normal());
      // D_crack[phi](x) = (eps^2/4) sum_k w_k K(x, y_k, e_perp) s(X_k).
      const double wk = 0.25 * eps * eps * rule.weights[k];
      for (int j = 0; j < n; ++j) {
        const Matrix2 kern = dlp_traction_kernel(mesh.point(j), points[k], crack.normal(), mat);
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) crack_to_boundary(2 * j + p, 2 * k + q) = wk * kern(p, q);
      }
    }
  }

  /// Crack-equation rhs -(4/E) f at the nodes for a given w.
  std::array<std::vector<double>, 2> rhs(const Eigen::VectorXd& w, double young) const {
    const int m = static_cast<int>(points.size());
    const Eigen::VectorXd tw = dlp_traction * w;
    std::array<std::vector<double>, 2> r{std::vector<double>(m), std::vector<double>(m)};
    for (int k = 0; k < m; ++k) {
      r[0][k] = -4.0 / young * (u0_traction[k].x + tw(2 * k));
      r[1][k] = -4.0 / young * (u0_traction[k].y + tw(2 * k + 1));
    }
    return r;
  }

  Eigen::VectorXd smooth_values(const VectorDensity& psi) const {
    const int m = static_cast<int>(points.size());
    Eigen::VectorXd s(2 * m);
    for (int k = 0; k < m; ++k) {
      const Vec2 v = psi.smooth_part(rule.nodes[k]);
      s(2 * k) = v.x;
      s(2 * k + 1) = v.y;
    }
    return s;
  }

  VectorDensity invert(const Eigen::VectorXd& w, double young) const {
    const auto r = rhs(w, young);
    return VectorDensity{invert_A(std::span<const double>(r[0])), invert_A(std::span<const double>(r[1]))};
  }
};

inline double sup_norm(const Eigen::VectorXd& v) {
  double r = 0.0;
  for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) r = std::max(r, std::hypot(v(i), v(i + 1)));
  return r;
}

}  // namespace detail

/// Coupled solve of the cracked traction problem.
inline CrackedSolution solve_cracked(std::shared_ptr<const NeumannEvaluator> op,
                                     std::shared_ptr<const BackgroundSolution> background, const CrackSegment& crack,
                                     const CrackSolveOptions& opts = {}) {
  if (opts.n_modes < 1) throw InvalidArgument("solve_cracked: n_modes must be positive");
  const auto& mesh = *op->mesh();
  const double dist = mesh.distance_to_boundary(crack.center());
  if (!(0.5 * crack.length() < dist) || !mesh.contains(crack.center()))
    throw CrackTooCloseToBoundary("crack does not fit inside the domain at the requested length");
  op->require_interior(crack.point(-1.0));
  op->require_interior(crack.point(1.0));

  const double young = op->material().young();
  const detail::CrackCoupling cpl(*op, *background, crack, opts.n_modes);
  const int n2 = 2 * mesh.size();

  CrackSolveDiagnostics diag;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n2);
  VectorDensity psi;
  bool converged = false;
  double last_residual = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    psi = cpl.invert(w, young);
    const Eigen::VectorXd rhs = cpl.crack_to_boundary * cpl.smooth_values(psi);
    const auto sol = op->solve(to_field(op->mesh(), rhs));
    const Eigen::VectorXd w_new = to_vector(sol.solution);
    const double upd = detail::sup_norm(w_new - w);
    last_residual = sol.residual;
    diag.update_norms.push_back(upd);
    diag.iterations = it;
    w = w_new;
    if (upd < opts.tol) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    if (!opts.allow_direct_fallback)
      throw SolveFailed("crack fixed-point iteration did not converge in " + std::to_string(opts.max_iterations) +
                        " iterations (last update " + std::to_string(diag.update_norms.back()) + ")");
    // Direct solve of the reduced system in the crack unknowns:
    //   s = P (t0 + T Z s),  Z = Nsolve o crack_to_boundary.
    const int m2 = 2 * opts.n_modes;
    Eigen::MatrixXd z(n2, m2);
    for (int c = 0; c < m2; ++c) z.col(c) = to_vector(op->solve(to_field(op->mesh(), cpl.crack_to_boundary.col(c))).solution);
    const Eigen::MatrixXd tz = cpl.dlp_traction * z;
    // Linear map from crack tractions to smooth density values.
    Eigen::MatrixXd p(m2, m2);
    for (int c = 0; c < m2; ++c) {
      std::array<std::vector<double>, 2> r{std::vector<double>(opts.n_modes, 0.0), std::vector<double>(opts.n_modes, 0.0)};
      r[c % 2][c / 2] = -4.0 / young;
      const VectorDensity basis{invert_A(std::span<const double>(r[0])), invert_A(std::span<const double>(r[1]))};
      p.col(c) = cpl.smooth_values(basis);
    }
    Eigen::VectorXd t0(m2);
    for (int k = 0; k < opts.n_modes; ++k) {
      t0(2 * k) = cpl.u0_traction[k].x;
      t0(2 * k + 1) = cpl.u0_traction[k].y;
    }
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m2, m2) - p * tz;
    const Eigen::VectorXd s = a.partialPivLu().solve(p * t0);
    w = z * s;
    psi = cpl.invert(w, young);
    diag.used_direct_fallback = true;
  }

  // Residual of the crack equation with the final w.
  {
    const auto r = cpl.rhs(w, young);
    double res = 0.0;
    for (int k = 0; k < opts.n_modes; ++k) {
      const double x = cpl.rule.nodes[k];
      res = std::max(res, std::abs(apply_A(psi.first, x) - r[0][k]));
      res = std::max(res, std::abs(apply_A(psi.second, x) - r[1][k]));
    }
    diag.crack_residual = res;
  }
  diag.boundary_residual = last_residual;

  MeshPtr mesh_ptr = op->mesh();
  return CrackedSolution{std::move(op), std::move(background), crack, std::move(psi), to_field(mesh_ptr, w),
                         std::move(diag)};
}

/// Displacement jump phi(x1) = u|+ - u|- at canonical abscissa x1 in [-eps/2, eps/2].
inline Vec2 crack_opening(const CrackedSolution& sol, double x1) {
  const double half = 0.5 * sol.crack.length();
  if (std::abs(x1) > half * (1.0 + 1e-14)) throw DomainError("crack_opening: |x1| > eps/2");
  const double scaled = std::clamp(x1 / half, -1.0, 1.0);
  return half * sol.density(scaled);
}

/// u_eps on the boundary from u0 plus the Neumann-kernel integral of the crack opening,
/// int dN/dnu_y (x, y) phi(y) dsigma(y), by Gauss-Chebyshev quadrature over the crack.
inline BoundaryField evaluate_cracked_trace(const CrackedSolution& sol) {
  const auto& crack = sol.crack;
  const int m = static_cast<int>(std::max<std::size_t>(sol.density.size(), 1));
  const ChebyshevURule rule(m);
  const double eps = crack.length();
  BoundaryField out = sol.background->trace;
  for (int k = 0; k < m; ++k) {
    const Vec2 s = sol.density.smooth_part(rule.nodes[k]);
    if (s.x == 0.0 && s.y == 0.0) continue;
    const auto row = sol.operator_->neumann_conormal_row(crack.point(rule.nodes[k]), crack.normal());
    const Vec2 jump = (0.25 * eps * eps * rule.weights[k]) * s;
    out += row.apply(jump);
  }
  return out;
}

}  // namespace crackbem
