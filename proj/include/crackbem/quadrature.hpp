#pragma once

// Quadrature rules: Gauss-Legendre on [-1,1] and the periodic trapezoidal
// companions for logarithmic and Cauchy (cotangent) kernels on 2n equispaced
// nodes t_j = j pi / n.

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "crackbem/errors.hpp"
#include "crackbem/linalg2.hpp"

namespace crackbem {

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    if (n < 1) throw InvalidArgument("GaussLegendre: order must be positive");
    for (int i = 0; i < n; ++i) {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) { p1 = x; p0 = 1.0; }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  /// Shared, lazily built rule of the given order.
  static const GaussLegendre& order(int n) {
    static std::mutex mtx;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
  }
};

/// Weights R_k, k = 0..2n-1, with
///   int_0^{2pi} log(4 sin^2((t_i - tau)/2)) f(tau) dtau  ~  sum_j R_{|i-j|} f(t_j),
/// exact for trigonometric polynomials of degree < n.
inline std::vector<double> periodic_log_weights(int num_nodes) {
  if (num_nodes < 2 || num_nodes % 2 != 0) throw InvalidArgument("periodic_log_weights: need an even node count");
  const int n = num_nodes / 2;
  std::vector<double> r(num_nodes);
  for (int k = 0; k < num_nodes; ++k) {
    const double t = k * pi / n;
    double s = 0.0;
    for (int m = 1; m < n; ++m) s += std::cos(m * t) / m;
    r[k] = -2.0 * pi / n * s - pi / (static_cast<double>(n) * n) * std::cos(n * t);
  }
  return r;
}

/// Weights C_k, k = 0..2n-1, with
///   p.v. int_0^{2pi} (1/2) cot((tau - t_i)/2) f(tau) dtau  ~  sum_j C_{j-i mod 2n} f(t_j).
/// Only odd offsets carry weight; exact for trigonometric polynomials of degree < n.
inline std::vector<double> periodic_cot_weights(int num_nodes) {
  if (num_nodes < 2 || num_nodes % 2 != 0) throw InvalidArgument("periodic_cot_weights: need an even node count");
  const double h = 2.0 * pi / num_nodes;
  std::vector<double> c(num_nodes, 0.0);
  for (int k = 1; k < num_nodes; k += 2) c[k] = h / std::tan(0.5 * k * h);
  return c;
}

}  // namespace crackbem
