#include <gtest/gtest.h>

#include "crackbem/convergence.hpp"
#include "crackbem/crack.hpp"
#include "test_util.hpp"

using namespace crackbem;
using testutil::max_abs_diff;

namespace {

const LameParams kMat(1.0, 1.0);

using StressField = std::function<Matrix2(const Vec2&)>;

struct Problem {
  std::shared_ptr<const NeumannEvaluator> op;
  std::shared_ptr<const BackgroundSolution> bg;
};

Problem make_problem(const MeshPtr& mesh, const StressField& stress, LameParams mat = kMat) {
  auto op = std::make_shared<const NeumannEvaluator>(mesh, mat);
  const auto g = BoundaryField::sample(mesh, [&](const Vec2& x, const Vec2& n) { return stress(x) * n; });
  auto bg = std::make_shared<const BackgroundSolution>(op->solve_background(g));
  return {op, bg};
}

Problem disk_problem(int n, const Matrix2& stress) {
  return make_problem(build_mesh(DiskShape{1.0}, n), [=](const Vec2&) { return stress; });
}

/// Displacement u = (x^2 - y^2, -2xy) is divergence-free and harmonic, hence a Navier solution.
Matrix2 quadratic_gradient(const Vec2& x) { return Matrix2::from_rows(2 * x.x, -2 * x.y, -2 * x.y, -2 * x.x); }

Matrix2 quadratic_stress(const Vec2& x) { return stress_from_gradient(quadratic_gradient(x), kMat); }

}  // namespace

// ---------------------------------------------------------------------------
// Geometry

TEST(CrackSegment, FrameInvariants) {
  for (double a : {0.0, 0.4, 2.0, -1.1}) {
    const CrackSegment c({0.1, 0.2}, a, 0.3);
    EXPECT_NEAR(norm(c.tangent()), 1.0, 1e-15);
    EXPECT_NEAR(norm(c.normal()), 1.0, 1e-15);
    EXPECT_NEAR(dot(c.tangent(), c.normal()), 0.0, 1e-15);
    EXPECT_EQ(max_abs_diff(c.normal(), rot90(c.tangent())), 0.0);
  }
  EXPECT_THROW(CrackSegment({0, 0}, 0.0, 0.0), InvalidArgument);
  EXPECT_THROW(CrackSegment({0, 0}, Vec2{0, 0}, 0.1), InvalidArgument);
}

TEST(MapToCanonical, Examples) {
  const CrackSegment c({0.3, -0.2}, 0.7, 0.1);
  EXPECT_LT(max_abs(map_to_canonical(c, c.center())), 1e-16);
  EXPECT_LT(max_abs_diff(map_to_canonical(c, c.center() + 0.05 * c.tangent()), Vec2{0.05, 0.0}), 1e-16);
  for (int t = 0; t < 20; ++t) {
    const Vec2 p{testutil::uniform(-1, 1), testutil::uniform(-1, 1)};
    EXPECT_LT(max_abs_diff(map_from_canonical(c, map_to_canonical(c, p)), p), 1e-15);
    EXPECT_LT(max_abs_diff(vector_from_canonical(c, vector_to_canonical(c, p)), p), 1e-15);
  }
  EXPECT_LT(max_abs_diff(vector_to_canonical(c, c.normal()), Vec2{0, 1}), 1e-16);
  EXPECT_LT(max_abs_diff(c.point(1.0), c.center() + 0.05 * c.tangent()), 1e-16);
}

// ---------------------------------------------------------------------------
// Crack right-hand side

TEST(CrackRhs, ConstantStressGivesConstantTraction) {
  const Matrix2 s = Matrix2::from_rows(0.4, 0.3, 0.3, -1.2);
  const auto p = disk_problem(256, s);
  const CrackSegment c({0.3, 0.1}, 0.9, 0.2);
  for (double x : {-1.0, -0.5, 0.0, 0.7, 1.0})
    EXPECT_LT(max_abs_diff(crack_rhs(p.bg->evaluator, BoundaryField(p.op->mesh()), c, x), s * c.normal()), 1e-9);
  EXPECT_THROW(crack_rhs(p.bg->evaluator, BoundaryField(p.op->mesh()), c, 1.5), DomainError);
}

TEST(CrackRhs, RigidBackgroundGivesZero) {
  const auto m = build_mesh(DiskShape{1.0}, 128);
  const auto rigid = BoundaryField::sample(m, [](const Vec2& x, const Vec2&) { return Vec2{0.3 + x.y, -0.1 - x.x}; });
  const RepresentationEvaluator u0(m, kMat, rigid, BoundaryField(m));
  const CrackSegment c({0.1, -0.2}, 0.3, 0.2);
  for (double x : {-0.8, 0.0, 0.6}) EXPECT_LT(max_abs(crack_rhs(u0, BoundaryField(m), c, x)), 1e-9);
}

/// For a quadratic background the rhs is linear along the crack with slope (eps/2) d/dt of the traction.
TEST(CrackRhs, QuadraticBackgroundMatchesTaylorExpansion) {
  const auto p = make_problem(build_mesh(DiskShape{1.0}, 256), quadratic_stress);
  const CrackSegment c({0.2, -0.1}, 0.4, 0.2);
  const auto traction = [&](const Vec2& q) { return quadratic_stress(q) * c.normal(); };
  const Vec2 slope = testutil::directional_derivative(traction, c.center(), c.tangent());
  for (double x : {-1.0, -0.3, 0.5, 1.0}) {
    const Vec2 f = crack_rhs(p.bg->evaluator, BoundaryField(p.op->mesh()), c, x);
    EXPECT_LT(max_abs_diff(f, traction(c.center()) + (0.5 * c.length() * x) * slope), 1e-8);
  }
}

TEST(CrackRhs, BoundaryFeedbackIsTheTractionOfTheDoubleLayer) {
  const auto p = disk_problem(128, Matrix2::from_rows(1, 0, 0, 0));
  const auto& m = p.op->mesh();
  const auto w = BoundaryField::sample(m, [](const Vec2& x, const Vec2&) { return Vec2{x.x * x.y, std::cos(x.x)}; });
  const CrackSegment c({-0.2, 0.3}, 1.2, 0.1);
  const RepresentationEvaluator dw(m, kMat, w, BoundaryField(m));
  for (double x : {-0.9, 0.2}) {
    const Vec2 diff = crack_rhs(p.bg->evaluator, w, c, x) - crack_rhs(p.bg->evaluator, BoundaryField(m), c, x);
    EXPECT_LT(max_abs_diff(diff, dw.traction(c.point(x), c.normal())), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Coupled solve

TEST(SolveCracked, ZeroLoadGivesZeroSolution) {
  const auto p = disk_problem(64, Matrix2::zero());
  const auto sol = solve_cracked(p.op, p.bg, CrackSegment({0.2, 0.0}, 0.3, 0.1));
  EXPECT_EQ(sol.w.sup_norm(), 0.0);
  EXPECT_EQ(sol.density.first.max_abs_coeff(), 0.0);
  EXPECT_EQ(sol.density.second.max_abs_coeff(), 0.0);
}

TEST(SolveCracked, RejectsCracksThatDoNotFit) {
  const auto p = disk_problem(128, Matrix2::from_rows(1, 0, 0, 0));
  EXPECT_THROW(solve_cracked(p.op, p.bg, CrackSegment({0.8, 0.0}, 0.0, 0.5)), CrackTooCloseToBoundary);
  EXPECT_THROW(solve_cracked(p.op, p.bg, CrackSegment({1.5, 0.0}, 0.0, 0.1)), CrackTooCloseToBoundary);
  CrackSolveOptions o;
  o.n_modes = 0;
  EXPECT_THROW(solve_cracked(p.op, p.bg, CrackSegment({0.0, 0.0}, 0.0, 0.1), o), InvalidArgument);
}

/// Perpendicular tension: the U_0 coefficient approaches 4 p / E with an O(eps^2) error.
TEST(SolveCracked, LeadingCoefficientLaw) {
  const double p = 1.3;
  const auto pr = disk_problem(256, Matrix2::from_rows(0, 0, 0, p));
  const double want = 4 * p / kMat.young();
  double prev = 1.0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto sol = solve_cracked(pr.op, pr.bg, CrackSegment({0.3, 0.0}, 0.0, eps));
    const double rel = std::abs(sol.density.second.coeff(0) - want) / want;
    EXPECT_LT(rel, 0.6 * eps * eps) << eps;
    EXPECT_LT(rel, prev);
    prev = rel;
    // Symmetric load: tangential opening and odd modes vanish to rounding level.
    EXPECT_LT(sol.density.first.max_abs_coeff(), 1e-6 * want);
    EXPECT_LT(std::abs(sol.density.second.coeff(1)), 1e-3 * want);
    EXPECT_LT(sol.diagnostics.crack_residual, 1e-10);
  }
}

/// Quadratic background: the x sqrt(1-x^2) coefficient is (4/E)(eps/4) d/dt of the traction.
TEST(SolveCracked, FirstOrderCoefficientLaw) {
  const auto pr = make_problem(build_mesh(DiskShape{1.0}, 256), quadratic_stress);
  const Vec2 z{0.2, -0.1};
  for (double eps : {0.1, 0.05}) {
    const CrackSegment c(z, 0.4, eps);
    const auto sol = solve_cracked(pr.op, pr.bg, c);
    const auto traction = [&](const Vec2& q) { return quadratic_stress(q) * c.normal(); };
    const Vec2 dt = testutil::directional_derivative(traction, z, c.tangent());
    const Vec2 want = (4.0 / kMat.young()) * (eps / 4.0) * dt;
    // U_1 = 2x, so the coefficient of x sqrt(1-x^2) is 2 c_1.
    const Vec2 got = 2.0 * sol.density.coeff(1);
    EXPECT_LT(max_abs_diff(got, want), 0.1 * eps * max_abs(want) + 1e-12) << eps;
  }
}

TEST(SolveCracked, UpdateNormsDecreaseMonotonically) {
  const auto pr = make_problem(build_mesh(EllipseShape{1.2, 1.0}, 128), quadratic_stress);
  for (double eps : {0.3, 0.1}) {
    const auto sol = solve_cracked(pr.op, pr.bg, CrackSegment({0.1, 0.2}, 0.8, eps));
    const auto& u = sol.diagnostics.update_norms;
    ASSERT_GE(u.size(), 2u);
    for (std::size_t i = 1; i < u.size(); ++i) EXPECT_LT(u[i], u[i - 1]);
    // Contraction factor O(eps^2).
    EXPECT_LT(u[1] / u[0], 2.0 * eps * eps);
    EXPECT_FALSE(sol.diagnostics.used_direct_fallback);
    EXPECT_LT(u.back(), 1e-11);
  }
}

TEST(SolveCracked, DirectFallbackAgreesWithIteration) {
  const auto pr = make_problem(build_mesh(DiskShape{1.0}, 128), quadratic_stress);
  const CrackSegment c({0.1, 0.2}, 0.8, 0.3);
  const auto it = solve_cracked(pr.op, pr.bg, c);
  CrackSolveOptions o;
  o.max_iterations = 1;
  const auto direct = solve_cracked(pr.op, pr.bg, c, o);
  EXPECT_TRUE(direct.diagnostics.used_direct_fallback);
  EXPECT_LT((direct.w - it.w).sup_norm(), 1e-11);
  o.allow_direct_fallback = false;
  EXPECT_THROW(solve_cracked(pr.op, pr.bg, c, o), SolveFailed);
}

TEST(SolveCracked, WIsRigidMotionOrthogonal) {
  const auto pr = make_problem(build_mesh(DiskShape{1.0}, 128), quadratic_stress);
  const auto sol = solve_cracked(pr.op, pr.bg, CrackSegment({0.1, 0.2}, 0.8, 0.2));
  for (double v : sol.w.rigid_moments()) EXPECT_LT(std::abs(v), 1e-13);
}

/// Flipping e_perp negates the opening (read at the mirrored abscissa) and leaves the trace unchanged.
TEST(SolveCracked, OrientationConsistency) {
  const auto pr = make_problem(build_mesh(DiskShape{1.0}, 128), quadratic_stress);
  const CrackSegment c({0.1, 0.2}, 0.8, 0.2);
  const auto a = solve_cracked(pr.op, pr.bg, c);
  const auto b = solve_cracked(pr.op, pr.bg, c.reversed());
  EXPECT_LT((a.w - b.w).sup_norm(), 1e-12);
  for (double x1 : {-0.08, -0.03, 0.0, 0.05}) EXPECT_LT(max_abs_diff(crack_opening(b, x1), -1.0 * crack_opening(a, -x1)), 1e-12);
}

/// Rotating mesh, load and crack together rotates every output.
TEST(SolveCracked, FrameInvariance) {
  const double th = 0.7;
  const Matrix2 r = Matrix2::rotation(th);
  const Matrix2 s0 = Matrix2::from_rows(0.5, 0.2, 0.2, 1.0);
  const auto a = make_problem(build_mesh(Curve(EllipseShape{1.3, 1.0}), 128), [&](const Vec2&) { return s0; });
  const auto b = make_problem(build_mesh(Curve(EllipseShape{1.3, 1.0}, 1.0, th), 128),
                              [&](const Vec2&) { return r * s0 * r.transpose(); });
  const CrackSegment ca({0.2, -0.1}, Vec2{0.6, 0.8}, 0.2);
  const CrackSegment cb(r * ca.center(), r * ca.tangent(), 0.2);
  const auto sa = solve_cracked(a.op, a.bg, ca), sb = solve_cracked(b.op, b.bg, cb);
  double err = 0.0;
  for (int j = 0; j < 128; ++j) err = std::max(err, max_abs_diff(sb.w[j], r * sa.w[j]));
  EXPECT_LT(err, 1e-8 * sa.w.sup_norm());
  for (double x1 : {-0.05, 0.02}) EXPECT_LT(max_abs_diff(crack_opening(sb, x1), r * crack_opening(sa, x1)), 1e-8);
}

// ---------------------------------------------------------------------------
// Crack opening and cracked trace

TEST(CrackOpening, EndpointsAndLeadingProfile) {
  const double p = 1.0;
  const auto pr = disk_problem(256, Matrix2::from_rows(0, 0, 0, p));
  for (double eps : {0.1, 0.05}) {
    const auto sol = solve_cracked(pr.op, pr.bg, CrackSegment({0.3, 0.0}, 0.0, eps));
    EXPECT_EQ(max_abs(crack_opening(sol, 0.5 * eps)), 0.0);
    EXPECT_EQ(max_abs(crack_opening(sol, -0.5 * eps)), 0.0);
    EXPECT_THROW(crack_opening(sol, 0.51 * eps), DomainError);
    const double mid = crack_opening(sol, 0.0).y;
    EXPECT_LT(std::abs(mid - 2 * p * eps / kMat.young()) / (2 * p * eps / kMat.young()), eps * eps);
    for (double q : {-0.9, -0.4, 0.3, 0.8}) {
      const double x1 = 0.5 * eps * q;
      EXPECT_NEAR(crack_opening(sol, x1).y / mid, std::sqrt(1 - q * q), eps);
    }
  }
}

TEST(EvaluateCrackedTrace, AgreesWithCoupledSolve) {
  const auto pr = make_problem(build_mesh(DiskShape{1.0}, 128), quadratic_stress);
  const CrackSolveOptions opts;
  for (double eps : {0.2, 0.05}) {
    const auto sol = solve_cracked(pr.op, pr.bg, CrackSegment({0.1, 0.2}, 0.8, eps), opts);
    EXPECT_LT((evaluate_cracked_trace(sol) - sol.u_eps_trace()).sup_norm(), 10 * opts.tol);
  }
  // Zero density reproduces u0.
  const auto z = disk_problem(64, Matrix2::zero());
  const auto sol = solve_cracked(z.op, z.bg, CrackSegment({0.0, 0.0}, 0.0, 0.1));
  EXPECT_EQ((evaluate_cracked_trace(sol) - sol.u0_trace()).sup_norm(), 0.0);
}

TEST(EvaluateCrackedTrace, PerturbationIsOrderEpsSquared) {
  const auto pr = disk_problem(256, Matrix2::from_rows(1, 0, 0, 0));
  std::vector<double> eps{0.2, 0.1, 0.05, 0.025}, sup;
  for (double e : eps) sup.push_back(solve_cracked(pr.op, pr.bg, CrackSegment({0.3, 0.0}, pi / 4, e)).w.sup_norm());
  const auto fit = fit_loglog_slope(eps, sup);
  ASSERT_TRUE(fit);
  EXPECT_NEAR(fit->slope, 2.0, 0.1);
}

/// Crack parallel to a uniaxial load: the perturbation vanishes to rounding for a constant
/// stress and decays like eps^4 for a stress that is uniaxial at z but graded along the crack.
TEST(SolveCracked, TractionFreeOrientation) {
  const auto constant = disk_problem(256, Matrix2::from_rows(1, 0, 0, 0));
  for (double e : {0.2, 0.1, 0.05})
    EXPECT_LT(solve_cracked(constant.op, constant.bg, CrackSegment({0.3, 0.0}, 0.0, e)).w.sup_norm(), 1e-10);

  const Vec2 z{0.0, 0.3};
  const double c = 0.8;
  const auto graded =
      make_problem(build_mesh(DiskShape{1.0}, 256), [&](const Vec2& x) { return Matrix2::diag(1.0, c * (x.x - z.x)); });
  std::vector<double> eps{0.2, 0.1, 0.05}, sup;
  for (double e : eps) sup.push_back(solve_cracked(graded.op, graded.bg, CrackSegment(z, 0.0, e)).w.sup_norm());
  const auto fit = fit_loglog_slope(eps, sup, 1e-10);
  ASSERT_TRUE(fit);
  EXPECT_GE(fit->slope, 3.5);
}
