#pragma once

// Hadamard finite-part operator A[psi](x) = (1/pi) f.p. int_{-1}^{1} psi(y) / (x-y)^2 dy,
// the finite Hilbert transform, and the spectral inverse of A on the weighted
// second-kind Chebyshev basis sqrt(1-x^2) U_n(x), where A acts diagonally:
//
//   A[ sqrt(1-x^2) U_n ] = -(n+1) U_n.

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crackbem/errors.hpp"
#include "crackbem/linalg2.hpp"
#include "crackbem/quadrature.hpp"

namespace crackbem {

/// Second-kind Chebyshev polynomial U_n(x) by the three-term recurrence.
inline double chebyshev_u(int n, double x) {
  if (n < 0) return 0.0;
  double u0 = 1.0, u1 = 2.0 * x;
  if (n == 0) return u0;
  for (int k = 1; k < n; ++k) {
    const double u2 = 2.0 * x * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  return u1;
}

/// First-kind Chebyshev polynomial T_n(x).
inline double chebyshev_t(int n, double x) {
  if (n < 0) return 0.0;
  double t0 = 1.0, t1 = x;
  if (n == 0) return t0;
  for (int k = 1; k < n; ++k) {
    const double t2 = 2.0 * x * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

/// Clenshaw sum  sum_n c_n U_n(x).
inline double chebyshev_u_sum(std::span<const double> c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    const double b0 = c[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

/// Gauss-Chebyshev rule of the second kind: int sqrt(1-x^2) f(x) dx ~ sum w_k f(x_k),
/// with x_k = cos(k pi/(m+1)), the zeros of U_m. Exact for polynomials of degree < 2m.
struct ChebyshevURule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit ChebyshevURule(int m) {
    if (m < 1) throw InvalidArgument("ChebyshevURule: need at least one node");
    nodes.resize(m);
    weights.resize(m);
    for (int k = 1; k <= m; ++k) {
      const double th = k * pi / (m + 1);
      nodes[k - 1] = std::cos(th);
      weights[k - 1] = pi / (m + 1) * std::sin(th) * std::sin(th);
    }
  }

  std::size_t size() const { return nodes.size(); }
};

/// Nodes at which invert_A expects its right-hand side: zeros of U_n, descending.
inline std::vector<double> chebyshev_u_nodes(int n) { return ChebyshevURule(n).nodes; }

/// Density psi(x) = sqrt(1-x^2) sum_n c_n U_n(x) on (-1,1). Vanishes at both endpoints.
class ChebyshevUExpansion {
 public:
  ChebyshevUExpansion() = default;
  explicit ChebyshevUExpansion(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double coeff(std::size_t n) const { return n < coeffs_.size() ? coeffs_[n] : 0.0; }

  /// psi(x) for |x| <= 1.
  double operator()(double x) const {
    if (std::abs(x) > 1.0) throw DomainError("ChebyshevUExpansion: |x| > 1");
    return std::sqrt(std::max(0.0, 1.0 - x * x)) * smooth_part(x);
  }

  /// sum_n c_n U_n(x), i.e. psi without the square-root weight.
  double smooth_part(double x) const { return chebyshev_u_sum(coeffs_, x); }

  /// ||psi'||_Y = ( int sqrt(1-x^2) psi'(x)^2 dx )^{1/2} from the coefficients:
  /// psi' = -sum c_n (n+1) T_{n+1} / sqrt(1-x^2).
  double derivative_weighted_norm() const {
    double s = 0.0;
    for (std::size_t n = 0; n < coeffs_.size(); ++n) {
      const double t = coeffs_[n] * static_cast<double>(n + 1);
      s += t * t;
    }
    return std::sqrt(0.5 * pi * s);
  }

  double max_abs_coeff() const {
    double r = 0.0;
    for (double c : coeffs_) r = std::max(r, std::abs(c));
    return r;
  }

 private:
  std::vector<double> coeffs_;
};

/// Componentwise (2-vector valued) weighted density.
struct VectorDensity {
  ChebyshevUExpansion first;
  ChebyshevUExpansion second;

  Vec2 operator()(double x) const { return {first(x), second(x)}; }
  Vec2 smooth_part(double x) const { return {first.smooth_part(x), second.smooth_part(x)}; }
  Vec2 coeff(std::size_t n) const { return {first.coeff(n), second.coeff(n)}; }
  std::size_t size() const { return std::max(first.size(), second.size()); }
};

/// A[psi](x) for a density in the weighted basis: sum_n -(n+1) c_n U_n(x).
inline double apply_A(const ChebyshevUExpansion& psi, double x) {
  const auto& c = psi.coeffs();
  std::vector<double> scaled(c.size());
  for (std::size_t n = 0; n < c.size(); ++n) scaled[n] = -static_cast<double>(n + 1) * c[n];
  return chebyshev_u_sum(scaled, x);
}

/// Solve A[psi] = rhs given rhs at the zeros of U_m (m = rhs.size(), see chebyshev_u_nodes).
/// The rhs is projected onto U_0..U_{m-1} with the second-kind Gauss rule and every
/// coefficient is divided by -(n+1).
inline ChebyshevUExpansion invert_A(std::span<const double> rhs_at_nodes) {
  const int m = static_cast<int>(rhs_at_nodes.size());
  if (m == 0) throw InvalidArgument("invert_A: n_modes must be positive");
  const ChebyshevURule rule(m);
  std::vector<double> coeffs(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const double x = rule.nodes[k];
    const double wf = rule.weights[k] * rhs_at_nodes[k];
    double u0 = 1.0, u1 = 2.0 * x;
    for (int n = 0; n < m; ++n) {
      const double un = n == 0 ? u0 : u1;
      coeffs[n] += wf * un;
      if (n >= 1) {
        const double u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
      }
    }
  }
  for (int n = 0; n < m; ++n) coeffs[n] *= (2.0 / pi) / -static_cast<double>(n + 1);
  return ChebyshevUExpansion(std::move(coeffs));
}

/// Convenience overload: sample `rhs` at the zeros of U_{n_modes} and invert.
template <class F>
ChebyshevUExpansion invert_A(F&& rhs, int n_modes) {
  if (n_modes < 1) throw InvalidArgument("invert_A: n_modes must be positive");
  const auto nodes = chebyshev_u_nodes(n_modes);
  std::vector<double> vals(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) vals[k] = rhs(nodes[k]);
  return invert_A(std::span<const double>(vals));
}

namespace detail {

inline void require_open_interval(double x, const char* what) {
  if (!(std::abs(x) < 1.0)) throw DomainError(std::string(what) + ": |x| must be < 1");
}

/// int_{-1}^{1} g(y) dy split at x, with y = x -/+ ... substitutions that make
/// square-root endpoint behaviour at -1 and +1 analytic in the new variable:
///   [x, 1]:  y = 1 - (1-x) s^2,   [-1, x]: y = -1 + (1+x) s^2,   s in [0, 1].
/// The point y = x corresponds to s = 1 and is never sampled.
template <class G>
double split_endpoint_integral(G&& g, double x, int panels) {
  const GaussLegendre& gl = GaussLegendre::order(8);
  const int per_side = std::max(1, panels / 2);
  const double h = 1.0 / per_side;
  double right = 0.0, left = 0.0;
  for (int p = 0; p < per_side; ++p) {
    const double s0 = p * h;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double s = s0 + 0.5 * h * (gl.nodes[q] + 1.0);
      const double w = 0.5 * h * gl.weights[q];
      const double yr = 1.0 - (1.0 - x) * s * s;
      right += w * g(yr) * 2.0 * (1.0 - x) * s;
      const double yl = -1.0 + (1.0 + x) * s * s;
      left += w * g(yl) * 2.0 * (1.0 + x) * s;
    }
  }
  return left + right;
}

template <class F>
double central_derivative(F&& f, double x) {
  // Richardson-extrapolated central difference (fourth order).
  const double h = 1e-3 * std::min(1.0, 1.0 - std::abs(x));
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace detail

/// Raw Hadamard finite part  f.p. int_{-1}^{1} psi(y)/(x-y)^2 dy  by singularity subtraction:
/// the first-order Taylor polynomial of psi at x is integrated in closed form and the
/// bounded remainder by panel quadrature (`panels` Gauss-Legendre panels in total).
template <class F>
double hadamard_finite_part(F&& psi, double x, int panels = 4096) {
  detail::require_open_interval(x, "hadamard_finite_part");
  const double px = psi(x);
  const double dpx = detail::central_derivative(psi, x);
  const auto remainder = [&](double y) {
    const double d = y - x;
    return (psi(y) - px - dpx * d) / (d * d);
  };
  const double regular = detail::split_endpoint_integral(remainder, x, panels);
  const double fp_const = -2.0 / (1.0 - x * x);
  const double pv_linear = std::log((1.0 - x) / (1.0 + x));
  return regular + px * fp_const + dpx * pv_linear;
}

/// A[psi](x) = (1/pi) f.p. int psi(y)/(x-y)^2 dy by quadrature (no basis assumption).
template <class F>
double apply_A_quadrature(F&& psi, double x, int panels = 4096) {
  return hadamard_finite_part(psi, x, panels) / pi;
}

/// Finite Hilbert transform  H[psi](x) = (1/pi) p.v. int_{-1}^{1} psi(y)/(x-y) dy.
template <class F>
double finite_hilbert(F&& psi, double x, int panels = 4096) {
  detail::require_open_interval(x, "finite_hilbert");
  const double px = psi(x);
  const auto remainder = [&](double y) { return (psi(y) - px) / (x - y); };
  const double regular = detail::split_endpoint_integral(remainder, x, panels);
  return (regular + px * std::log((1.0 + x) / (1.0 - x))) / pi;
}

}  // namespace crackbem
