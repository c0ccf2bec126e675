#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "crackbem/bem.hpp"
#include "test_util.hpp"

using namespace crackbem;
using testutil::max_abs_diff;

namespace {

const LameParams kMat(1.0, 1.0);

std::shared_ptr<const NeumannEvaluator> disk_operator(int n, double radius = 1.0, LameParams mat = kMat) {
  return std::make_shared<const NeumannEvaluator>(build_mesh(DiskShape{radius}, n), mat);
}

BoundaryField traction_of(const MeshPtr& m, const Matrix2& stress) {
  return BoundaryField::sample(m, [&](const Vec2&, const Vec2& n) { return stress * n; });
}

/// Trace of the linear field u(x) = grad x, projected onto the rigid-motion complement.
BoundaryField linear_trace(const MeshPtr& m, const Matrix2& grad) {
  return project_onto_L2Psi(BoundaryField::sample(m, [&](const Vec2& x, const Vec2&) { return grad * x; }));
}

/// Boundary trace of the k-th column of N(., y), recomputed from the public solve interface.
BoundaryField neumann_trace(const NeumannEvaluator& ev, const Vec2& y, int k) {
  BoundaryField rhs = ev.apply_single_layer(ev.neumann_boundary_traction(y, k));
  const auto& m = ev.mesh();
  for (int j = 0; j < m->size(); ++j) rhs[j] += kelvin_matrix(m->point(j) - y, ev.material()).column(k);
  return ev.solve(rhs).solution;
}

/// Kelvin field centred outside the domain: a smooth Navier solution with analytic gradient.
struct ExteriorKelvinField {
  Vec2 centre;
  int column;
  LameParams mat;
  Vec2 value(const Vec2& x) const { return kelvin_matrix(x - centre, mat).column(column); }
  Matrix2 gradient(const Vec2& x) const {
    const auto g = kelvin_gradient(x - centre, mat);
    return Matrix2::from_columns(g[0].column(column), g[1].column(column));
  }
  Vec2 traction(const Vec2& x, const Vec2& n) const { return conormal_derivative(gradient(x), n, mat); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Boundary operator

TEST(AssembleK, RigidMotionsSpanTheNullSpace) {
  for (const Shape& s : {Shape(DiskShape{1.0}), Shape(EllipseShape{2.0, 1.0}), Shape(FourierShape{1.0, {0.1}, {0.0, 0.1}})}) {
    const auto m = build_mesh(s, 128);
    const Eigen::MatrixXd op = -0.5 * Eigen::MatrixXd::Identity(256, 256) + assemble_K(*m, kMat);
    for (const auto& r : rigid_motion_basis()) {
      const auto f = BoundaryField::sample(m, [&](const Vec2& x, const Vec2&) { return r(x); });
      EXPECT_LT((op * to_vector(f)).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_EQ((op * Eigen::VectorXd::Zero(256)).norm(), 0.0);
  }
}

TEST(AssembleK, SingularValuesShowExactlyThreeNullDirections) {
  const auto m = build_mesh(DiskShape{1.0}, 128);
  const Eigen::MatrixXd op = -0.5 * Eigen::MatrixXd::Identity(256, 256) + assemble_K(*m, kMat);
  const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(op).singularValues();
  const int n = static_cast<int>(sv.size());
  EXPECT_LT(sv(n - 1), 1e-6);
  EXPECT_LT(sv(n - 2), 1e-6);
  EXPECT_LT(sv(n - 3), 1e-6);
  EXPECT_GT(sv(n - 4), 1e-3);
}

/// The interior limit of D[phi] equals (1/2 I + K) phi.
TEST(AssembleK, InteriorJumpRelation) {
  const Shape shape = EllipseShape{1.5, 1.0};
  const auto coarse = build_mesh(shape, 128);
  const auto fine = build_mesh(shape, 4096);
  const auto density = [](const BoundaryMesh& m, int j) {
    const double t = m.param(j);
    return Vec2{std::cos(t) + 0.3 * std::sin(2 * t), 0.5 * std::sin(t) - 0.2 * std::cos(3 * t)};
  };
  std::vector<Vec2> phic(coarse->size()), phif(fine->size());
  for (int j = 0; j < coarse->size(); ++j) phic[j] = density(*coarse, j);
  for (int j = 0; j < fine->size(); ++j) phif[j] = density(*fine, j);
  const Eigen::VectorXd jump =
      (0.5 * Eigen::MatrixXd::Identity(256, 256) + assemble_K(*coarse, kMat)) * to_vector(BoundaryField(coarse, phic));
  const RepresentationEvaluator dl(fine, kMat, BoundaryField(fine, phif), BoundaryField(fine));
  for (int j : {0, 17, 40, 77, 101}) {
    const Vec2 x = coarse->point(j), n = coarse->normal(j);
    // Cubic extrapolation in the distance from four interior samples.
    const double d[4] = {0.04, 0.03, 0.02, 0.01};
    Vec2 v[4];
    for (int i = 0; i < 4; ++i) v[i] = dl.value(x - d[i] * n);
    Vec2 lim{};
    for (int i = 0; i < 4; ++i) {
      double l = 1.0;
      for (int k = 0; k < 4; ++k)
        if (k != i) l *= (0.0 - d[k]) / (d[i] - d[k]);
      lim += l * v[i];
    }
    EXPECT_LT(max_abs_diff(lim, Vec2{jump(2 * j), jump(2 * j + 1)}), 1e-4) << "node " << j;
  }
}

TEST(AssembleS, SymmetricUnderNodeExchangeOnTheDisk) {
  const auto m = build_mesh(DiskShape{1.0}, 64);
  const Eigen::MatrixXd s = assemble_S(*m, kMat);
  // Equal weights on the disk make the discrete single layer symmetric.
  EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-13);
}

// ---------------------------------------------------------------------------
// Background solve

TEST(SolveBackground, LinearFieldsAreRecovered) {
  const auto op = disk_operator(256);
  const auto& m = op->mesh();
  const double e1 = 0.7, s = 0.4;
  for (const Matrix2& grad : {Matrix2::from_rows(e1, 0, 0, 0), Matrix2::from_rows(0, s, s, 0),
                              Matrix2::from_rows(0.3, -0.2, 0.5, -0.1)}) {
    const Matrix2 stress = stress_from_gradient(grad, kMat);
    const auto bg = op->solve_background(traction_of(m, stress));
    EXPECT_LT((bg.trace - linear_trace(m, grad)).sup_norm(), 1e-8);
    EXPECT_LT(bg.residual, 1e-12);
    for (const Vec2& p : {Vec2{0, 0}, Vec2{0.3, -0.2}, Vec2{-0.5, 0.4}})
      EXPECT_LT(max_abs_diff(bg.evaluator.stress(p), stress), 1e-8);
  }
  // Pure shear: gradient at the origin.
  const auto bg = op->solve_background(traction_of(m, stress_from_gradient(Matrix2::from_rows(0, s, s, 0), kMat)));
  EXPECT_LT(max_abs_diff(bg.evaluator.gradient({0, 0}), Matrix2::from_rows(0, s, s, 0)), 1e-8);
}

TEST(SolveBackground, ZeroLoadGivesZeroTrace) {
  const auto op = disk_operator(64);
  const auto bg = op->solve_background(BoundaryField(op->mesh()));
  EXPECT_EQ(bg.trace.sup_norm(), 0.0);
  EXPECT_EQ(max_abs(bg.evaluator.value({0.2, 0.1})), 0.0);
}

TEST(SolveBackground, RejectsNonEquilibratedLoad) {
  const auto op = disk_operator(64);
  const auto g = BoundaryField::sample(op->mesh(), [](const Vec2&, const Vec2&) { return Vec2{1, 0}; });
  EXPECT_THROW(op->solve_background(g), EquilibriumViolated);
}

TEST(SolveBackground, TraceIsRigidMotionOrthogonal) {
  const auto op = disk_operator(128);
  const auto g = project_onto_L2Psi(BoundaryField::sample(op->mesh(), [](const Vec2& x, const Vec2&) {
    return Vec2{std::cos(3 * x.x) + x.y * x.y, std::sin(2 * x.y) * x.x};
  }));
  const auto bg = op->solve_background(g);
  for (double v : bg.trace.rigid_moments()) EXPECT_LT(std::abs(v), 1e-12);
}

/// Doubling the node count changes the trace by less than 1e-8 for analytic data.
TEST(SolveBackground, SelfConvergenceInNodeCount) {
  const auto load = [](const MeshPtr& m) {
    return project_onto_L2Psi(BoundaryField::sample(m, [](const Vec2& x, const Vec2& n) {
      return Vec2{n.x * (1 + 0.3 * x.y), 0.5 * n.y + 0.2 * x.x * x.y};
    }));
  };
  const auto a = disk_operator(128), b = disk_operator(256);
  const auto ta = a->solve_background(load(a->mesh())).trace;
  const auto tb = b->solve_background(load(b->mesh())).trace;
  double diff = 0.0;
  for (int j = 0; j < 128; ++j) diff = std::max(diff, max_abs_diff(ta[j], tb[2 * j]));
  EXPECT_LT(diff, 1e-8);
}

TEST(SolveBackground, NonDiskGeometryReproducesLinearField) {
  for (const Shape& s : {Shape(EllipseShape{2.0, 1.0}), Shape(FourierShape{1.0, {0.1, 0.05}, {0.0, 0.08}})}) {
    const auto op = std::make_shared<const NeumannEvaluator>(build_mesh(s, 256), LameParams(2.0, 0.5));
    const Matrix2 grad = Matrix2::from_rows(0.3, -0.2, 0.5, -0.1);
    const auto bg = op->solve_background(traction_of(op->mesh(), stress_from_gradient(grad, op->material())));
    EXPECT_LT((bg.trace - linear_trace(op->mesh(), grad)).sup_norm(), 1e-8);
  }
}

// ---------------------------------------------------------------------------
// Neumann function

TEST(NeumannRow, RigidMomentsVanish) {
  const auto op = disk_operator(128);
  const auto row = op->neumann_conormal_row({0.3, -0.1}, testutil::random_unit());
  for (int c = 0; c < 2; ++c)
    for (double v : row.column(c).rigid_moments()) EXPECT_LT(std::abs(v), 1e-10);
}

TEST(NeumannRow, RotationEquivarianceOnTheDisk) {
  const int n = 128, shift = 11;
  const auto op = disk_operator(n);
  const double th = 2 * pi * shift / n;
  const Matrix2 r = Matrix2::rotation(th);
  const Vec2 z{0.3, 0.2}, e = Vec2{0.6, 0.8};
  const auto a = op->neumann_conormal_row(z, e);
  const auto b = op->neumann_conormal_row(r * z, r * e);
  double err = 0.0;
  for (int j = 0; j < n; ++j) err = std::max(err, max_abs_diff(b.values[(j + shift) % n], r * a.values[j] * r.transpose()));
  EXPECT_LT(err, 1e-8);
}

TEST(NeumannRow, RejectsSourcesNearOrOutsideTheBoundary) {
  const auto op = disk_operator(128);
  EXPECT_THROW(op->neumann_conormal_row({0.99, 0.0}, {0, 1}), CrackTooCloseToBoundary);
  EXPECT_THROW(op->neumann_conormal_row({1.5, 0.0}, {0, 1}), CrackTooCloseToBoundary);
}

/// The row equals the traction in y of the Neumann function's boundary trace (finite differences).
TEST(NeumannRow, MatchesTractionOfNeumannTraceInSourcePoint) {
  const auto op = std::make_shared<const NeumannEvaluator>(build_mesh(EllipseShape{1.3, 1.0}, 128), LameParams(1.5, 0.8));
  const Vec2 z{0.2, -0.15}, e = Vec2{0.28, 0.96};
  const auto row = op->neumann_conormal_row(z, e);
  const auto& m = op->mesh();
  // trace[l](x)_i = N(x, y) e_l, component i.
  auto traces = [&](const Vec2& y) {
    return std::array<BoundaryField, 2>{neumann_trace(*op, y, 0), neumann_trace(*op, y, 1)};
  };
  const double h = 1e-3;
  std::array<std::array<BoundaryField, 2>, 2> d;  // d[m][l]: d/dy_m of trace l
  for (int mm = 0; mm < 2; ++mm) {
    const Vec2 dir = mm == 0 ? Vec2{1, 0} : Vec2{0, 1};
    const auto p1 = traces(z + h * dir), m1 = traces(z - h * dir);
    const auto p2 = traces(z + 0.5 * h * dir), m2 = traces(z - 0.5 * h * dir);
    for (int l = 0; l < 2; ++l) {
      BoundaryField c1 = (1.0 / (2 * h)) * (p1[l] - m1[l]);
      BoundaryField c2 = (1.0 / h) * (p2[l] - m2[l]);
      d[mm][l] = (1.0 / 3.0) * (4.0 * c2 - c1);
    }
  }
  double err = 0.0;
  for (int j = 0; j < m->size(); ++j) {
    for (int i = 0; i < 2; ++i) {
      // W(y)_l = trace[l](x_j)_i; its gradient grad(l, mm).
      Matrix2 grad;
      for (int l = 0; l < 2; ++l)
        for (int mm = 0; mm < 2; ++mm) grad(l, mm) = d[mm][l][j][i];
      const Vec2 t = conormal_derivative(grad, e, op->material());
      err = std::max(err, std::max(std::abs(row.values[j](i, 0) - t.x), std::abs(row.values[j](i, 1) - t.y)));
    }
  }
  EXPECT_LT(err, 1e-6 * row.sup_norm());
}

/// Reproducing property: int row(x)^T g(x) dsigma = sigma(u)(z) e_perp for any
/// traction problem with data g.
TEST(NeumannRow, ReproducesInteriorTraction) {
  const LameParams mat(1.3, 0.7);
  const auto op = std::make_shared<const NeumannEvaluator>(build_mesh(EllipseShape{1.3, 1.0}, 256), mat);
  const auto& m = op->mesh();
  const Vec2 z{0.2, -0.1}, e{0.6, 0.8};
  const auto row = op->neumann_conormal_row(z, e);
  for (int col = 0; col < 2; ++col) {
    const ExteriorKelvinField u{{3.0, 1.0 - col}, col, mat};
    Vec2 acc{};
    for (int j = 0; j < m->size(); ++j)
      acc += m->weight(j) * (row.values[j].transpose() * u.traction(m->point(j), m->normal(j)));
    EXPECT_LT(max_abs_diff(acc, u.traction(z, e)), 1e-9 * norm(u.traction(z, e)));
  }
}

TEST(NeumannFunction, Reciprocity) {
  const auto op = std::make_shared<const NeumannEvaluator>(build_mesh(EllipseShape{1.4, 1.0}, 128), LameParams(1.0, 1.0));
  for (const auto& [x, y] : {std::pair<Vec2, Vec2>{{0.3, 0.1}, {-0.2, 0.4}}, {{0.0, -0.5}, {0.6, 0.2}}}) {
    const Matrix2 a = op->neumann_function(x, y), b = op->neumann_function(y, x);
    EXPECT_LT(max_abs_diff(a, b.transpose()), 1e-7);
  }
}

/// The boundary traction datum integrates to -I against translations.
TEST(NeumannFunction, TotalBoundaryTractionIsMinusIdentity) {
  const auto op = disk_operator(128);
  for (const Vec2& y : {Vec2{0.2, 0.1}, Vec2{-0.4, 0.5}}) {
    for (int k = 0; k < 2; ++k) {
      const auto h = op->neumann_boundary_traction(y, k);
      const auto mom = h.rigid_moments();
      EXPECT_NEAR(mom[0], k == 0 ? -1.0 : 0.0, 1e-8);
      EXPECT_NEAR(mom[1], k == 1 ? -1.0 : 0.0, 1e-8);
    }
  }
}

/// N(x, y) + Phi(x - y) is regular at x = y.
TEST(NeumannFunction, SingularPartIsMinusKelvin) {
  const auto op = disk_operator(128);
  const Vec2 y{0.1, 0.2};
  const double r = 1e-4;
  const Vec2 d{r, 0.0};
  const Matrix2 a = op->neumann_function(y + d, y) + kelvin_matrix(d, kMat);
  const Matrix2 b = op->neumann_function(y - d, y) + kelvin_matrix(-1.0 * d, kMat);
  EXPECT_LT(max_abs_diff(a, b), 1e-3);
}

// ---------------------------------------------------------------------------
// Dirichlet Green function row

TEST(GreenRow, RotationEquivarianceOnTheDisk) {
  const int n = 128, shift = 19;
  const auto m = build_mesh(DiskShape{1.0}, n);
  const DirichletEvaluator ev(m, kMat);
  const Matrix2 r = Matrix2::rotation(2 * pi * shift / n);
  const Vec2 z{0.25, -0.3}, e{0.8, -0.6};
  const auto a = ev.green_conormal2_row(z, e);
  const auto b = ev.green_conormal2_row(r * z, r * e);
  double err = 0.0;
  for (int j = 0; j < n; ++j) err = std::max(err, max_abs_diff(b.values[(j + shift) % n], r * a.values[j] * r.transpose()));
  EXPECT_LT(err, 1e-6 * a.sup_norm());
}

TEST(GreenRow, CentredSourceConjugatesUnderRotation) {
  const int n = 128, shift = 32;  // quarter turn
  const auto m = build_mesh(DiskShape{1.0}, n);
  const DirichletEvaluator ev(m, kMat);
  const Matrix2 r = Matrix2::rotation(2 * pi * shift / n);
  const Vec2 e{1.0, 0.0};
  const auto a = ev.green_conormal2_row({0, 0}, e);
  const auto b = ev.green_conormal2_row({0, 0}, r * e);
  double err = 0.0;
  for (int j = 0; j < n; ++j) err = std::max(err, max_abs_diff(b.values[(j + shift) % n], r * a.values[j] * r.transpose()));
  EXPECT_LT(err, 1e-6 * a.sup_norm());
}

TEST(GreenRow, HomogeneousOfDegreeMinusTwo) {
  const int n = 128;
  const DirichletEvaluator small(build_mesh(DiskShape{1.0}, n), kMat);
  const DirichletEvaluator big(build_mesh(DiskShape{2.0}, n), kMat);
  const Vec2 z{0.3, 0.1}, e{0.6, 0.8};
  const auto a = small.green_conormal2_row(z, e);
  const auto b = big.green_conormal2_row(2.0 * z, e);
  double err = 0.0;
  for (int j = 0; j < n; ++j) err = std::max(err, max_abs_diff(b.values[j], 0.25 * a.values[j]));
  EXPECT_LT(err, 1e-8 * a.sup_norm());
}

/// Reproducing property: int row(x)^T u(x) dsigma = -sigma(u)(z) e_perp for any Navier solution u.
TEST(GreenRow, ReproducesInteriorTraction) {
  const LameParams mat(1.3, 0.7);
  const auto m = build_mesh(EllipseShape{1.3, 1.0}, 256);
  const DirichletEvaluator ev(m, mat);
  const Vec2 z{0.2, -0.1}, e{0.6, 0.8};
  const auto row = ev.green_conormal2_row(z, e);
  for (int col = 0; col < 2; ++col) {
    const ExteriorKelvinField u{{-2.5, 2.0}, col, mat};
    Vec2 acc{};
    for (int j = 0; j < m->size(); ++j) acc += m->weight(j) * (row.values[j].transpose() * u.value(m->point(j)));
    EXPECT_LT(max_abs_diff(acc, -1.0 * u.traction(z, e)), 1e-9 * norm(u.traction(z, e)));
  }
  // Linear fields, including a rigid offset.
  const Matrix2 grad = Matrix2::from_rows(0.3, 0.2, -0.5, 0.9);
  Vec2 acc{};
  for (int j = 0; j < m->size(); ++j)
    acc += m->weight(j) * (row.values[j].transpose() * (grad * m->point(j) + Vec2{0.3, -0.2}));
  EXPECT_LT(max_abs_diff(acc, -1.0 * (stress_from_gradient(grad, mat) * e)), 1e-9);
}

TEST(GreenRow, RejectsSourcesNearTheBoundary) {
  const DirichletEvaluator ev(build_mesh(DiskShape{1.0}, 128), kMat);
  EXPECT_THROW(ev.green_conormal2_row({0.995, 0.0}, {0, 1}), CrackTooCloseToBoundary);
}

/// Near-boundary evaluation: linear fields are exact at any distance and a
/// quadratic field stays accurate down to one node spacing.
TEST(RepresentationEvaluator, CloseEvaluation) {
  const LameParams mat(1.0, 1.0);
  const auto m = build_mesh(EllipseShape{1.2, 1.0}, 256);
  const NeumannEvaluator ev(m, mat);
  const double h = m->max_spacing();
  const auto grad_quadratic = [](const Vec2& x) { return Matrix2::from_rows(2 * x.x, -2 * x.y, -2 * x.y, -2 * x.x); };
  const Matrix2 s_lin = Matrix2::from_rows(1.0, 0.4, 0.4, -0.3);
  const auto lin = ev.solve_background(BoundaryField::sample(m, [&](const Vec2&, const Vec2& n) { return s_lin * n; }));
  const auto quad = ev.solve_background(BoundaryField::sample(
      m, [&](const Vec2& x, const Vec2& n) { return stress_from_gradient(grad_quadratic(x), mat) * n; }));
  for (double k : {0.5, 1.0, 2.0, 3.0}) {
    double e_lin = 0.0, e_quad = 0.0;
    for (int a = 0; a < 40; ++a) {
      const double th = 0.05 + 2 * pi * a / 40;
      const Vec2 b{1.2 * std::cos(th), std::sin(th)};
      const Vec2 n = Vec2{std::cos(th), 1.2 * std::sin(th)} / norm(Vec2{std::cos(th), 1.2 * std::sin(th)});
      const Vec2 p = b - (k * h) * n;
      e_lin = std::max(e_lin, max_abs(lin.evaluator.stress(p) - s_lin));
      e_quad = std::max(e_quad, max_abs(quad.evaluator.stress(p) - stress_from_gradient(grad_quadratic(p), mat)));
    }
    EXPECT_LT(e_lin, 1e-12) << k;
    EXPECT_LT(e_quad, k >= 2.0 ? 1e-4 : 2e-2) << k;
  }
}
