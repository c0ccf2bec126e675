#pragma once

#include <string>

#include "crackbem/errors.hpp"
#include "crackbem/linalg2.hpp"

namespace crackbem {

/// Isotropic Lame moduli together with every constant derived from them.
///
/// The derived constants are computed once in the constructor and are
/// read-only afterwards; kernels read them, never recompute them.
class LameParams {
 public:
  LameParams(double lambda, double mu) : lambda_(lambda), mu_(mu) {
    if (!(mu > 0.0) || !(lambda + mu > 0.0)) {
      throw InvalidArgument("inadmissible Lame parameters: need mu > 0 and lambda + mu > 0 (lambda=" +
                            std::to_string(lambda) + ", mu=" + std::to_string(mu) + ")");
    }
    const double l2m = lambda + 2.0 * mu;
    kelvin_a_ = (lambda + 3.0 * mu) / (2.0 * mu * l2m);
    kelvin_b_ = (lambda + mu) / (2.0 * mu * l2m);
    lambda_prime_ = (lambda + 3.0 * mu) / (4.0 * pi * mu * l2m);
    mu_prime_ = (lambda + mu) / (4.0 * pi * mu * l2m);
    dlp_a_ = -mu / (2.0 * pi * l2m);
    dlp_b_ = -(lambda + mu) / (pi * l2m);
    young_ = 4.0 * mu * (lambda + mu) / l2m;
  }

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Coefficient of the log term of the Kelvin matrix (times 2*pi).
  double kelvin_a() const { return kelvin_a_; }
  /// Coefficient of the dyadic term of the Kelvin matrix (times 2*pi).
  double kelvin_b() const { return kelvin_b_; }
  /// kelvin_a / (2 pi): log coefficient in the rewritten Kelvin matrix.
  double lambda_prime() const { return lambda_prime_; }
  /// kelvin_b / (2 pi): gradient-of-log coefficient in the rewritten Kelvin matrix.
  double mu_prime() const { return mu_prime_; }
  /// Isotropic coefficient of the double-layer traction kernel.
  double dlp_a() const { return dlp_a_; }
  /// Dyadic coefficient of the double-layer traction kernel.
  double dlp_b() const { return dlp_b_; }
  /// Two-dimensional Young's modulus 4 mu (lambda + mu) / (lambda + 2 mu).
  double young() const { return young_; }

 private:
  double lambda_;
  double mu_;
  double kelvin_a_;
  double kelvin_b_;
  double lambda_prime_;
  double mu_prime_;
  double dlp_a_;
  double dlp_b_;
  double young_;
};

/// Isotropic Hooke law: stress from a displacement gradient (grad(i,j) = du_i/dx_j).
inline Matrix2 stress_from_gradient(const Matrix2& grad, const LameParams& mat) {
  const double div = grad.trace();
  Matrix2 s = mat.mu() * (grad + grad.transpose());
  s(0, 0) += mat.lambda() * div;
  s(1, 1) += mat.lambda() * div;
  return s;
}

/// Inverse Hooke law: symmetric strain for a given symmetric stress.
inline Matrix2 strain_from_stress(const Matrix2& stress, const LameParams& mat) {
  const double tr = stress.trace();
  const double iso = mat.lambda() / (2.0 * (mat.lambda() + mat.mu())) * tr;
  Matrix2 e = stress;
  e(0, 0) -= iso;
  e(1, 1) -= iso;
  return (1.0 / (2.0 * mat.mu())) * e;
}

}  // namespace crackbem
