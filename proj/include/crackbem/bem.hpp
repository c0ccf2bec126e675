#pragma once

// Nystrom discretization of the elastostatic layer potentials on a smooth
// closed curve, the traction-free background solve, and the Neumann / Dirichlet
// source-point solves used by the crack asymptotics.
//
// Unknown ordering everywhere: index 2 j + c is component c at node j.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "crackbem/errors.hpp"
#include "crackbem/kernels.hpp"
#include "crackbem/material.hpp"
#include "crackbem/mesh.hpp"
#include "crackbem/quadrature.hpp"

namespace crackbem {

/// Discrete principal-value double-layer operator K on the boundary.
///
/// The kernel splits into a continuous part and a skew Cauchy part
///   -/+ a d/dtau log|y(tau) - x| = -/+ a [ (1/2) cot((tau - t)/2) + L(t, tau) ]
/// with L smooth. The cotangent part uses the exact periodic odd-offset rule,
/// everything else the trapezoidal rule with analytic diagonal limits.
inline Eigen::MatrixXd assemble_K(const BoundaryMesh& mesh, const LameParams& mat) {
  const int n = mesh.size();
  const double h = 2.0 * pi / n;
  const double a = mat.dlp_a(), b = mat.dlp_b();
  const auto cotw = periodic_cot_weights(n);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 x = mesh.point(i);
    for (int j = 0; j < n; ++j) {
      const Vec2 y = mesh.point(j);
      const double sp = mesh.speed(j);
      Matrix2 smooth;
      double skew_log = 0.0;  // L(t_i, t_j) * h
      if (i != j) {
        const Vec2 d = x - y;
        const double r2 = norm2(d);
        const Vec2& ny = mesh.normal(j);
        const double nd = dot(ny, d) / r2;
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) smooth(p, q) = (a * (p == q ? 1.0 : 0.0) + b * d[p] * d[q] / r2) * nd;
        smooth *= h * sp;
        const double dlog = dot(mesh.d1(j), y - x) / r2;
        skew_log = h * (dlog - 0.5 / std::tan(0.5 * (mesh.param(j) - mesh.param(i))));
      } else {
        const Vec2 tau = mesh.d1(j) / sp;
        const double kappa = mesh.curvature(j);
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) smooth(p, q) = (a * (p == q ? 1.0 : 0.0) + b * tau[p] * tau[q]) * (-0.5 * kappa);
        smooth *= h * sp;
        skew_log = h * 0.5 * dot(mesh.d1(j), mesh.d2(j)) / (sp * sp);
      }
      const double skew = skew_log + cotw[((j - i) % n + n) % n];
      k(2 * i, 2 * j) += smooth(0, 0);
      k(2 * i, 2 * j + 1) += smooth(0, 1) - a * skew;
      k(2 * i + 1, 2 * j) += smooth(1, 0) + a * skew;
      k(2 * i + 1, 2 * j + 1) += smooth(1, 1);
    }
  }
  return k;
}

/// Discrete single-layer operator S[g](x) = int Phi(x - y) g(y) dsigma(y) on the boundary,
/// with the logarithmic singularity integrated by the periodic product rule.
inline Eigen::MatrixXd assemble_S(const BoundaryMesh& mesh, const LameParams& mat) {
  const int n = mesh.size();
  const double h = 2.0 * pi / n;
  const double ca = mat.kelvin_a() / (2.0 * pi);
  const double cb = mat.kelvin_b() / (2.0 * pi);
  const auto logw = periodic_log_weights(n);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 x = mesh.point(i);
    for (int j = 0; j < n; ++j) {
      const double sp = mesh.speed(j);
      const int off = std::abs(i - j);
      double log_part = 0.5 * logw[off];
      Matrix2 dyad;
      if (i != j) {
        const Vec2 d = x - mesh.point(j);
        const double r2 = norm2(d);
        const double sn = std::sin(0.5 * (mesh.param(i) - mesh.param(j)));
        log_part += h * 0.5 * std::log(r2 / (4.0 * sn * sn));
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) dyad(p, q) = d[p] * d[q] / r2;
      } else {
        log_part += h * std::log(sp);
        const Vec2 tau = mesh.d1(j) / sp;
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) dyad(p, q) = tau[p] * tau[q];
      }
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          s(2 * i + p, 2 * j + q) = sp * ((p == q ? ca * log_part : 0.0) - cb * h * dyad(p, q));
    }
  }
  return s;
}

inline Eigen::VectorXd to_vector(const BoundaryField& f) {
  Eigen::VectorXd v(2 * f.size());
  for (int j = 0; j < f.size(); ++j) {
    v(2 * j) = f[j].x;
    v(2 * j + 1) = f[j].y;
  }
  return v;
}

inline BoundaryField to_field(const MeshPtr& mesh, const Eigen::Ref<const Eigen::VectorXd>& v) {
  BoundaryField f(mesh);
  for (int j = 0; j < f.size(); ++j) f[j] = {v(2 * j), v(2 * j + 1)};
  return f;
}

/// Result of a bordered solve: the density, the Lagrange multipliers that
/// absorb any component of the rhs outside the operator's range, and the
/// relative residual of the full bordered system.
struct BorderedSolve {
  BoundaryField solution;
  Eigen::VectorXd multipliers;
  double residual = 0.0;
};

/// LU-factorized bordered system [Op, P; Q, 0] where the columns of P and the
/// rows of Q are built from the first `n_constraints` rigid motions (translations,
/// then rotation). Q carries the quadrature weights, so Q u = 0 means
/// int u . psi dsigma = 0.
class BorderedOperator {
 public:
  BorderedOperator(MeshPtr mesh, const Eigen::MatrixXd& op, int n_constraints)
      : mesh_(std::move(mesh)), nc_(n_constraints) {
    const int n2 = 2 * mesh_->size();
    system_ = Eigen::MatrixXd::Zero(n2 + nc_, n2 + nc_);
    system_.topLeftCorner(n2, n2) = op;
    const auto basis = rigid_motion_basis();
    for (int j = 0; j < mesh_->size(); ++j) {
      for (int m = 0; m < nc_; ++m) {
        const Vec2 psi = basis[m](mesh_->point(j));
        system_(2 * j, n2 + m) = psi.x;
        system_(2 * j + 1, n2 + m) = psi.y;
        system_(n2 + m, 2 * j) = mesh_->weight(j) * psi.x;
        system_(n2 + m, 2 * j + 1) = mesh_->weight(j) * psi.y;
      }
    }
    lu_.compute(system_);
  }

  const MeshPtr& mesh() const { return mesh_; }

  /// Solve Op u + P c = rhs, Q u = constraint_values.
  BorderedSolve solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& constraint_values) const {
    const int n2 = 2 * mesh_->size();
    Eigen::VectorXd b(n2 + nc_);
    b.head(n2) = rhs;
    b.tail(nc_) = constraint_values;
    const Eigen::VectorXd x = lu_.solve(b);
    const double scale = std::max(b.norm(), 1e-300);
    BorderedSolve out{to_field(mesh_, x.head(n2)), x.tail(nc_), (system_ * x - b).norm() / scale};
    if (b.norm() == 0.0) out.residual = 0.0;
    return out;
  }

  BorderedSolve solve(const Eigen::VectorXd& rhs) const { return solve(rhs, Eigen::VectorXd::Zero(nc_)); }

 private:
  MeshPtr mesh_;
  int nc_;
  Eigen::MatrixXd system_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Interior evaluation of  u(x) = D[phi](x) - S[g](x)  and its gradient by the
/// trapezoidal rule. Within `kCloseSpacings` node spacings of the boundary the
/// linear Navier field matching phi, d phi/ds and g at the nearest node is
/// subtracted from the densities and added back exactly (Green's identity
/// reproduces linear fields), which removes the leading near-boundary error.
class RepresentationEvaluator {
 public:
  static constexpr double kCloseSpacings = 6.0;

  RepresentationEvaluator(MeshPtr mesh, LameParams mat, BoundaryField dlp_density, BoundaryField slp_density)
      : mesh_(std::move(mesh)), mat_(mat), phi_(std::move(dlp_density)), g_(std::move(slp_density)) {
    close_ = kCloseSpacings * mesh_->max_spacing();
  }

  const MeshPtr& mesh() const { return mesh_; }
  const LameParams& material() const { return mat_; }

  Vec2 value(const Vec2& x) const {
    const LinearField lin = local_field(x);
    Vec2 u = lin.value(x);
    for (int j = 0; j < mesh_->size(); ++j) {
      const double w = mesh_->weight(j);
      const Vec2& y = mesh_->point(j);
      u += w * (dlp_traction_kernel(x, y, mesh_->normal(j), mat_) * (phi_[j] - lin.value(y)));
      u -= w * (kelvin_matrix(x - y, mat_) * (g_[j] - lin.stress * mesh_->normal(j)));
    }
    return u;
  }

  /// grad(i, m) = du_i / dx_m.
  Matrix2 gradient(const Vec2& x) const {
    const LinearField lin = local_field(x);
    Matrix2 gr = lin.grad;
    for (int j = 0; j < mesh_->size(); ++j) {
      const double w = mesh_->weight(j);
      const Vec2& y = mesh_->point(j);
      const auto dk = dlp_traction_kernel_gradient(x, y, mesh_->normal(j), mat_);
      const auto dphi = kelvin_gradient(x - y, mat_);
      const Vec2 a = phi_[j] - lin.value(y), b = g_[j] - lin.stress * mesh_->normal(j);
      for (int m = 0; m < 2; ++m) {
        const Vec2 col = w * (dk[m] * a - dphi[m] * b);
        gr(0, m) += col.x;
        gr(1, m) += col.y;
      }
    }
    return gr;
  }

  Matrix2 stress(const Vec2& x) const { return stress_from_gradient(gradient(x), mat_); }
  Vec2 traction(const Vec2& x, const Vec2& normal) const { return conormal_derivative(gradient(x), normal, mat_); }

 private:
  /// u(y) = u0 + grad (y - y0); zero away from the boundary.
  struct LinearField {
    Vec2 u0{}, y0{};
    Matrix2 grad{}, stress{};
    Vec2 value(const Vec2& y) const { return u0 + grad * (y - y0); }
  };

  LinearField local_field(const Vec2& x) const {
    LinearField lin;
    int k = -1;
    double best = close_;
    for (int j = 0; j < mesh_->size(); ++j) {
      const double d = norm(x - mesh_->point(j));
      if (d < best) best = d, k = j;
    }
    if (k < 0) return lin;
    // Arc-length derivative of phi at node k by trigonometric interpolation.
    const int n = mesh_->size();
    Vec2 dphi{};
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const double sgn = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      dphi += (0.5 * sgn / std::tan(pi * (k - j) / n)) * phi_[j];
    }
    dphi = dphi / mesh_->speed(k);
    // Solve grad tau = dphi/ds and sigma(grad) n = g for the four entries of grad.
    const Vec2 nk = mesh_->normal(k), tau = mesh_->d1(k) / mesh_->speed(k);
    Eigen::Matrix4d a;
    for (int c = 0; c < 4; ++c) {
      Matrix2 e;
      e(c / 2, c % 2) = 1.0;
      const Vec2 r0 = e * tau, r1 = stress_from_gradient(e, mat_) * nk;
      a.col(c) << r0.x, r0.y, r1.x, r1.y;
    }
    const Eigen::Vector4d rhs(dphi.x, dphi.y, g_[k].x, g_[k].y);
    const Eigen::Vector4d sol = a.partialPivLu().solve(rhs);
    lin.grad = Matrix2::from_rows(sol(0), sol(1), sol(2), sol(3));
    lin.stress = stress_from_gradient(lin.grad, mat_);
    lin.u0 = phi_[k];
    lin.y0 = mesh_->point(k);
    return lin;
  }

  MeshPtr mesh_;
  LameParams mat_;
  BoundaryField phi_;
  BoundaryField g_;
  double close_ = 0.0;
};

/// Linear map  w |-> traction (normal n) of D[w] at a fixed interior point,
/// as a 2 x 2N matrix.
inline Eigen::MatrixXd dlp_traction_row(const BoundaryMesh& mesh, const LameParams& mat, const Vec2& x,
                                        const Vec2& n) {
  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(2, 2 * mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    const auto dk = dlp_traction_kernel_gradient(x, mesh.point(j), mesh.normal(j), mat);
    for (int c = 0; c < 2; ++c) {
      // Gradient of D[e_c] (weight included), then its traction.
      Matrix2 grad;
      for (int m = 0; m < 2; ++m) {
        grad(0, m) = dk[m](0, c);
        grad(1, m) = dk[m](1, c);
      }
      const Vec2 t = mesh.weight(j) * conormal_derivative(grad, n, mat);
      row(0, 2 * j + c) = t.x;
      row(1, 2 * j + c) = t.y;
    }
  }
  return row;
}

/// Solution of the crack-free traction problem with its interior evaluator.
struct BackgroundSolution {
  BoundaryField traction;  ///< Applied boundary traction g.
  BoundaryField trace;     ///< u0 on the boundary, orthogonal to the rigid motions.
  RepresentationEvaluator evaluator;
  double residual = 0.0;
};

/// Factorized (-1/2 I + K) bordered by the rigid motions, plus the discrete
/// single layer. One factorization serves every right-hand side.
class NeumannEvaluator {
 public:
  struct Options {
    double residual_tol = 1e-10;
    /// Minimum source distance from the boundary, in units of the largest node spacing.
    double min_distance_spacings = 2.0;
  };

  NeumannEvaluator(MeshPtr mesh, LameParams mat) : NeumannEvaluator(std::move(mesh), mat, Options{}) {}

  NeumannEvaluator(MeshPtr mesh, LameParams mat, Options opts)
      : mesh_(std::move(mesh)),
        mat_(mat),
        opts_(opts),
        k_(assemble_K(*mesh_, mat_)),
        s_(assemble_S(*mesh_, mat_)),
        op_(mesh_, -0.5 * Eigen::MatrixXd::Identity(2 * mesh_->size(), 2 * mesh_->size()) + k_, 3) {}

  const MeshPtr& mesh() const { return mesh_; }
  const LameParams& material() const { return mat_; }
  const Eigen::MatrixXd& double_layer() const { return k_; }
  const Eigen::MatrixXd& single_layer() const { return s_; }
  const Options& options() const { return opts_; }

  /// Minimum admissible distance of a source point from the boundary.
  double min_source_distance() const { return opts_.min_distance_spacings * mesh_->max_spacing(); }

  void require_interior(const Vec2& z) const {
    if (!mesh_->contains(z) || mesh_->distance_to_boundary(z) < min_source_distance())
      throw CrackTooCloseToBoundary("source point (" + std::to_string(z.x) + ", " + std::to_string(z.y) +
                                    ") is outside the domain or too close to the boundary");
  }

  /// Solve (-1/2 I + K) u = rhs with u orthogonal to the rigid motions.
  BorderedSolve solve(const BoundaryField& rhs) const {
    auto out = op_.solve(to_vector(rhs));
    if (!(out.residual < opts_.residual_tol))
      throw SolveFailed("boundary solve residual " + std::to_string(out.residual) + " exceeds tolerance");
    return out;
  }

  BoundaryField apply_single_layer(const BoundaryField& g) const { return to_field(mesh_, s_ * to_vector(g)); }

  /// Traction-driven background problem. The traction must be orthogonal to the rigid motions.
  BackgroundSolution solve_background(const BoundaryField& g, double equilibrium_tol = 1e-9) const {
    if (!g.equilibrated(equilibrium_tol))
      throw EquilibriumViolated("boundary traction is not orthogonal to the rigid motions");
    const auto sol = solve(apply_single_layer(g));
    return BackgroundSolution{g, sol.solution, RepresentationEvaluator(mesh_, mat_, sol.solution, g), sol.residual};
  }

  /// x |-> dN/dnu_y (x, z) on the boundary for the conormal with normal e_perp at z.
  /// Column c is the boundary response to the unit jump e_c across an
  /// infinitesimal segment at z.
  MatrixBoundaryField neumann_conormal_row(const Vec2& z, const Vec2& e_perp) const {
    require_interior(z);
    std::array<BoundaryField, 2> cols;
    for (int c = 0; c < 2; ++c) {
      const auto rhs = BoundaryField::sample(
          mesh_, [&](const Vec2& x, const Vec2&) { return dlp_traction_kernel(x, z, e_perp, mat_).column(c); });
      cols[c] = solve(rhs).solution;
    }
    return MatrixBoundaryField::from_columns(cols[0], cols[1]);
  }

  /// Generalized Neumann function N(x, y) for x, y interior (x != y):
  /// L N(., y) = -delta_y I, traction -sum_m psi_m(x) psi_m(y)^T with {psi_m}
  /// L2-orthonormal rigid motions, and N(., y) orthogonal to the rigid motions.
  /// Its translation part reduces to the -I/|dOmega| boundary datum.
  Matrix2 neumann_function(const Vec2& x, const Vec2& y) const {
    require_interior(y);
    require_interior(x);
    Matrix2 out;
    for (int k = 0; k < 2; ++k) {
      const BoundaryField h = neumann_boundary_traction(y, k);
      BoundaryField rhs = apply_single_layer(h);
      for (int j = 0; j < mesh_->size(); ++j) rhs[j] += kelvin_matrix(mesh_->point(j) - y, mat_).column(k);
      const BoundaryField trace = solve(rhs).solution;
      const RepresentationEvaluator ev(mesh_, mat_, trace, h);
      const Vec2 col = ev.value(x) - kelvin_matrix(x - y, mat_).column(k);
      out(0, k) = col.x;
      out(1, k) = col.y;
    }
    return out;
  }

  /// Boundary traction of the k-th column of N(., y).
  BoundaryField neumann_boundary_traction(const Vec2& y, int k) const {
    const Eigen::Matrix3d ginv = rigid_gram(*mesh_).inverse();
    const auto basis = rigid_motion_basis();
    Eigen::Vector3d py;
    for (int m = 0; m < 3; ++m) py(m) = basis[m](y)[k];
    const Eigen::Vector3d coef = ginv * py;
    return BoundaryField::sample(mesh_, [&](const Vec2& x, const Vec2&) {
      Vec2 v{};
      for (int m = 0; m < 3; ++m) v -= coef(m) * basis[m](x);
      return v;
    });
  }

 private:
  MeshPtr mesh_;
  LameParams mat_;
  Options opts_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd s_;
  BorderedOperator op_;
};

/// x |-> d^2 G / dnu_x dnu_y (x, z) on the boundary for the Dirichlet Green function G
/// (normal e_perp at z). Column c is minus the inverse single layer of the
/// dipole field dPhi/dnu_y(. - z) e_c, computed with zero net traction.
class DirichletEvaluator {
 public:
  DirichletEvaluator(MeshPtr mesh, LameParams mat, double min_distance_spacings = 2.0)
      : mesh_(std::move(mesh)), mat_(mat), min_spacings_(min_distance_spacings), op_(mesh_, assemble_S(*mesh_, mat_), 2) {}

  const MeshPtr& mesh() const { return mesh_; }

  MatrixBoundaryField green_conormal2_row(const Vec2& z, const Vec2& e_perp) const {
    if (!mesh_->contains(z) || mesh_->distance_to_boundary(z) < min_spacings_ * mesh_->max_spacing())
      throw CrackTooCloseToBoundary("source point is outside the domain or too close to the boundary");
    std::array<BoundaryField, 2> cols;
    for (int c = 0; c < 2; ++c) {
      const auto rhs = BoundaryField::sample(
          mesh_, [&](const Vec2& x, const Vec2&) { return -dlp_traction_kernel(x, z, e_perp, mat_).column(c); });
      auto sol = op_.solve(to_vector(rhs));
      if (!(sol.residual < 1e-10)) throw SolveFailed("single-layer solve did not converge");
      cols[c] = std::move(sol.solution);
    }
    return MatrixBoundaryField::from_columns(cols[0], cols[1]);
  }

 private:
  MeshPtr mesh_;
  LameParams mat_;
  double min_spacings_;
  BorderedOperator op_;
};

/// Free function forms.
inline BackgroundSolution solve_background(const NeumannEvaluator& ev, const BoundaryField& g) {
  return ev.solve_background(g);
}

inline MatrixBoundaryField neumann_conormal_row(const NeumannEvaluator& ev, const Vec2& z, const Vec2& e_perp) {
  return ev.neumann_conormal_row(z, e_perp);
}

inline MatrixBoundaryField green_conormal2_row(const DirichletEvaluator& ev, const Vec2& z, const Vec2& e_perp) {
  return ev.green_conormal2_row(z, e_perp);
}

}  // namespace crackbem
