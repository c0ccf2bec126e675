#pragma once

// Crack-length sweeps comparing the coupled full solve with the leading-order
// asymptotics, and a deterministic index-ordered parallel map for batch jobs.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "crackbem/asymptotics.hpp"
#include "crackbem/bem.hpp"
#include "crackbem/convergence.hpp"
#include "crackbem/crack.hpp"

namespace crackbem {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results are stored by index.
/// The first exception thrown by any job is rethrown after all workers stop.
template <class R>
std::vector<R> parallel_map(std::size_t n, int threads, const std::function<R(std::size_t)>& fn) {
  std::vector<R> out(n);
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mtx;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(err_mtx);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

struct SweepPoint {
  double eps = 0.0;
  double sup_w = 0.0;            ///< sup |u_eps - u0| on the boundary.
  double sup_leading = 0.0;      ///< sup of the leading-order formula.
  double sup_mismatch = 0.0;     ///< sup |(u_eps - u0) - formula|.
  double energy_diff = 0.0;      ///< -1/2 int (u_eps - u0) . g.
  double energy_formula = 0.0;   ///< energy_asymptotic.
  double energy_mismatch = 0.0;  ///< |energy_diff - energy_formula|.
  Vec2 mid_opening{};            ///< phi at the crack center.
  int iterations = 0;
  double crack_residual = 0.0;
};

/// One leading-order row per crack center/orientation, reused for every length.
struct SweepContext {
  std::shared_ptr<const NeumannEvaluator> op;
  std::shared_ptr<const BackgroundSolution> background;
  CrackSegment crack;  ///< Template: center and orientation; the length is replaced.
  Vec2 traction{};
  StressIntensity sif{};
  MatrixBoundaryField neumann_row;

  SweepContext(std::shared_ptr<const NeumannEvaluator> op_, std::shared_ptr<const BackgroundSolution> bg,
               const CrackSegment& crack_)
      : op(std::move(op_)), background(std::move(bg)), crack(crack_) {
    traction = traction_at_crack(background->evaluator, crack);
    sif = stress_intensity(background->evaluator, crack);
    neumann_row = op->neumann_conormal_row(crack.center(), crack.normal());
  }
};

inline SweepPoint run_sweep_point(const SweepContext& ctx, double eps, const CrackSolveOptions& opts) {
  const CrackSegment c = ctx.crack.with_length(eps);
  const auto sol = solve_cracked(ctx.op, ctx.background, c, opts);
  const auto& mat = ctx.op->material();
  const BoundaryField lead = neumann_perturbation(ctx.neumann_row, c, ctx.traction, mat);
  SweepPoint p;
  p.eps = eps;
  p.sup_w = sol.w.sup_norm();
  p.sup_leading = lead.sup_norm();
  p.sup_mismatch = (sol.w - lead).sup_norm();
  p.energy_diff = potential_energy_difference(ctx.background->traction, sol.u_eps_trace(), sol.u0_trace());
  p.energy_formula = energy_asymptotic(eps, ctx.sif, mat);
  p.energy_mismatch = std::abs(p.energy_diff - p.energy_formula);
  p.mid_opening = crack_opening(sol, 0.0);
  p.iterations = sol.diagnostics.iterations;
  p.crack_residual = sol.diagnostics.crack_residual;
  return p;
}

inline std::vector<SweepPoint> run_sweep(const SweepContext& ctx, std::span<const double> lengths,
                                         const CrackSolveOptions& opts, int threads = 1) {
  return parallel_map<SweepPoint>(lengths.size(), threads,
                                  [&](std::size_t i) { return run_sweep_point(ctx, lengths[i], opts); });
}

}  // namespace crackbem
