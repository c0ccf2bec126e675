#pragma once

// Closed-form small-crack asymptotics: boundary perturbation (traction and
// displacement problems), energy change, stress intensity factors and the
// topological derivative of the potential energy.
//
// A crack of length eps with background traction t = sigma(u0)(z) e_perp opens as
// phi(s) ~ (2/E) t sqrt(eps^2 - 4 s^2), whose integral over the crack is
// (pi eps^2 / (2E)) t. Every leading term below carries that factor.

#include <cmath>

#include "crackbem/bem.hpp"
#include "crackbem/crack.hpp"
#include "crackbem/linalg2.hpp"
#include "crackbem/material.hpp"

namespace crackbem {

/// Integral of the leading crack opening per unit background traction: pi eps^2 / (2E).
inline double opening_moment(double eps, const LameParams& mat) { return pi * eps * eps / (2.0 * mat.young()); }

/// Mode I / mode II components of sigma(u0)(z) e_perp in the crack frame.
struct StressIntensity {
  double k1 = 0.0;
  double k2 = 0.0;

  double squared_norm() const { return k1 * k1 + k2 * k2; }

  /// k1 e_perp + k2 e.
  Vec2 traction(const CrackSegment& crack) const { return k1 * crack.normal() + k2 * crack.tangent(); }
};

inline StressIntensity stress_intensity(const Matrix2& stress, const CrackSegment& crack) {
  const Vec2 t = stress * crack.normal();
  return {dot(t, crack.normal()), dot(t, crack.tangent())};
}

/// Background traction sigma(u0)(z) e_perp at the crack center.
inline Vec2 traction_at_crack(const RepresentationEvaluator& u0, const CrackSegment& crack) {
  return u0.traction(crack.center(), crack.normal());
}

inline StressIntensity stress_intensity(const RepresentationEvaluator& u0, const CrackSegment& crack) {
  return stress_intensity(u0.stress(crack.center()), crack);
}

/// Leading boundary perturbation u_eps - u0 on the boundary for the traction problem:
/// (pi eps^2/(2E)) dN/dnu_y (x, z) t.
inline BoundaryField neumann_perturbation(const MatrixBoundaryField& neumann_row, const CrackSegment& crack,
                                          const Vec2& traction, const LameParams& mat) {
  BoundaryField out = neumann_row.apply(traction);
  out *= opening_moment(crack.length(), mat);
  return out;
}

inline BoundaryField neumann_perturbation(const NeumannEvaluator& ev, const CrackSegment& crack, const Vec2& traction) {
  if (traction.x == 0.0 && traction.y == 0.0) return BoundaryField(ev.mesh());
  return neumann_perturbation(ev.neumann_conormal_row(crack.center(), crack.normal()), crack, traction,
                              ev.material());
}

/// Leading perturbation of the boundary traction for the displacement problem:
/// (pi eps^2/(2E)) d^2G/dnu_x dnu_y (x, z) t.
inline BoundaryField dirichlet_perturbation(const DirichletEvaluator& ev, const CrackSegment& crack,
                                            const Vec2& traction, const LameParams& mat) {
  if (traction.x == 0.0 && traction.y == 0.0) return BoundaryField(ev.mesh());
  BoundaryField out = ev.green_conormal2_row(crack.center(), crack.normal()).apply(traction);
  out *= opening_moment(crack.length(), mat);
  return out;
}

/// J_eps[u_eps] - J[u0] = -1/2 int (u_eps - u0) . g dsigma.
inline double potential_energy_difference(const BoundaryField& g, const BoundaryField& u_eps,
                                          const BoundaryField& u0) {
  g.require_same_mesh(u_eps);
  g.require_same_mesh(u0);
  return -0.5 * (u_eps - u0).inner(g);
}

/// Leading energy change -(pi eps^2/(4E)) (K_I^2 + K_II^2).
inline double energy_asymptotic(double eps, const StressIntensity& sif, const LameParams& mat) {
  return -0.5 * opening_moment(eps, mat) * sif.squared_norm();
}

/// Topological derivative with respect to rho(eps) = pi eps^2:
/// -(1/(4E)) (K_I^2 + K_II^2).
inline double topological_derivative(const StressIntensity& sif, const LameParams& mat) {
  return -sif.squared_norm() / (4.0 * mat.young());
}

}  // namespace crackbem
