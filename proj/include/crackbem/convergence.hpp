#pragma once

// Log-log slope fits for asymptotic-order studies.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "crackbem/errors.hpp"

namespace crackbem {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  ///< log(C) in  value ~ C h^slope.
  int points_used = 0;
};

/// Least-squares fit of log(value) against log(h). Points whose value is at or
/// below `noise_floor` are dropped; returns nullopt when fewer than two remain.
inline std::optional<SlopeFit> fit_loglog_slope(std::span<const double> h, std::span<const double> value,
                                                double noise_floor = 0.0) {
  if (h.size() != value.size()) throw InvalidArgument("fit_loglog_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(std::abs(value[i]) > noise_floor)) continue;
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(std::abs(value[i])));
  }
  const std::size_t n = lx.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  const double slope = sxy / sxx;
  return SlopeFit{slope, my - slope * mx, static_cast<int>(n)};
}

}  // namespace crackbem
