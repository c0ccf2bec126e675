#pragma once

// Smooth closed boundary curves, their equispaced-parameter discretization,
// and fields sampled at the boundary nodes.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crackbem/errors.hpp"
#include "crackbem/kernels.hpp"
#include "crackbem/linalg2.hpp"

namespace crackbem {

struct DiskShape {
  double radius = 1.0;
};

struct EllipseShape {
  double semi_x = 1.0;
  double semi_y = 1.0;
};

/// Star-shaped curve r(t) = r0 + sum_k (a_k cos kt + b_k sin kt), k = 1, 2, ...
struct FourierShape {
  double r0 = 1.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

using Shape = std::variant<DiskShape, EllipseShape, FourierShape>;

/// Counter-clockwise parametrization t in [0, 2pi) -> R^2, followed by a
/// similarity transform (scale, rotation, translation).
class Curve {
 public:
  explicit Curve(Shape shape, double scale = 1.0, double rotation = 0.0, Vec2 translation = {})
      : shape_(std::move(shape)), scale_(scale), rotation_(rotation), translation_(translation) {
    if (!(scale > 0.0)) throw InvalidArgument("Curve: scale must be positive");
    std::visit([](const auto& s) { validate(s); }, shape_);
  }

  const Shape& shape() const { return shape_; }
  double scale() const { return scale_; }
  double rotation() const { return rotation_; }
  Vec2 translation() const { return translation_; }

  /// Same shape with an extra similarity applied on top.
  Curve transformed(double scale, double rotation, Vec2 translation) const {
    return Curve(shape_, scale_ * scale, rotation_ + rotation, rotate(scale * translation_, rotation) + translation);
  }

  Vec2 position(double t) const { return to_world(raw(t, 0)) + translation_; }
  Vec2 derivative(double t) const { return to_world(raw(t, 1)); }
  Vec2 second_derivative(double t) const { return to_world(raw(t, 2)); }

 private:
  Vec2 to_world(const Vec2& p) const { return scale_ * rotate(p, rotation_); }

  Vec2 raw(double t, int order) const {
    return std::visit([&](const auto& s) { return eval(s, t, order); }, shape_);
  }

  static void validate(const DiskShape& s) {
    if (!(s.radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  }
  static void validate(const EllipseShape& s) {
    if (!(s.semi_x > 0.0) || !(s.semi_y > 0.0)) throw InvalidArgument("ellipse semi-axes must be positive");
  }
  static void validate(const FourierShape& s) {
    if (!(s.r0 > 0.0)) throw InvalidArgument("fourier curve: r0 must be positive");
  }

  static Vec2 eval(const DiskShape& s, double t, int order) {
    return eval(EllipseShape{s.radius, s.radius}, t, order);
  }
  static Vec2 eval(const EllipseShape& s, double t, int order) {
    const double c = std::cos(t), sn = std::sin(t);
    switch (order) {
      case 0: return {s.semi_x * c, s.semi_y * sn};
      case 1: return {-s.semi_x * sn, s.semi_y * c};
      default: return {-s.semi_x * c, -s.semi_y * sn};
    }
  }
  static Vec2 eval(const FourierShape& s, double t, int order) {
    double r = s.r0, dr = 0.0, ddr = 0.0;
    for (std::size_t k = 0; k < s.cos_coeffs.size(); ++k) {
      const double m = static_cast<double>(k + 1);
      const double c = std::cos(m * t), sn = std::sin(m * t);
      r += s.cos_coeffs[k] * c;
      dr -= m * s.cos_coeffs[k] * sn;
      ddr -= m * m * s.cos_coeffs[k] * c;
    }
    for (std::size_t k = 0; k < s.sin_coeffs.size(); ++k) {
      const double m = static_cast<double>(k + 1);
      const double c = std::cos(m * t), sn = std::sin(m * t);
      r += s.sin_coeffs[k] * sn;
      dr += m * s.sin_coeffs[k] * c;
      ddr -= m * m * s.sin_coeffs[k] * sn;
    }
    const double c = std::cos(t), sn = std::sin(t);
    switch (order) {
      case 0: return {r * c, r * sn};
      case 1: return {dr * c - r * sn, dr * sn + r * c};
      default: return {ddr * c - 2.0 * dr * sn - r * c, ddr * sn + 2.0 * dr * c - r * sn};
    }
  }

  Shape shape_;
  double scale_;
  double rotation_;
  Vec2 translation_;
};

namespace detail {

inline bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Simple, counter-clockwise closed polygon through the given samples.
inline void check_simple_ccw(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += cross(pts[i], pts[(i + 1) % n]);
  if (!(area > 0.0)) throw InvalidArgument("boundary curve is not counter-clockwise (winding number != 1)");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
        throw InvalidArgument("boundary curve is self-intersecting");
    }
  }
}

}  // namespace detail

/// Nodes t_j = 2 pi j / N of a closed curve with outward normals and
/// trapezoidal weights (2 pi / N) |x'(t_j)|.
class BoundaryMesh {
 public:
  BoundaryMesh(Curve curve, int n_nodes) : curve_(std::move(curve)) {
    if (n_nodes < 16 || n_nodes % 2 != 0) throw InvalidArgument("build_mesh: n_nodes must be even and >= 16");
    const int n = n_nodes;
    params_.resize(n);
    points_.resize(n);
    d1_.resize(n);
    d2_.resize(n);
    normals_.resize(n);
    speed_.resize(n);
    weights_.resize(n);
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * pi * j / n;
      params_[j] = t;
      points_[j] = curve_.position(t);
      d1_[j] = curve_.derivative(t);
      d2_[j] = curve_.second_derivative(t);
      speed_[j] = norm(d1_[j]);
      if (!(speed_[j] > 0.0)) throw InvalidArgument("boundary curve has a stationary point");
      normals_[j] = Vec2{d1_[j].y, -d1_[j].x} / speed_[j];
      weights_[j] = 2.0 * pi / n * speed_[j];
    }
    // Winding check on a refined polygon.
    const int fine = std::max(4 * n, 512);
    std::vector<Vec2> poly(fine);
    for (int j = 0; j < fine; ++j) poly[j] = curve_.position(2.0 * pi * j / fine);
    detail::check_simple_ccw(poly);
    Vec2 c{};
    double len = 0.0;
    for (int j = 0; j < n; ++j) {
      c += weights_[j] * points_[j];
      len += weights_[j];
    }
    centroid_ = c / len;
    perimeter_ = len;
  }

  int size() const { return static_cast<int>(points_.size()); }
  const Curve& curve() const { return curve_; }
  double param(int j) const { return params_[j]; }
  const Vec2& point(int j) const { return points_[j]; }
  const Vec2& normal(int j) const { return normals_[j]; }
  const Vec2& d1(int j) const { return d1_[j]; }
  const Vec2& d2(int j) const { return d2_[j]; }
  double speed(int j) const { return speed_[j]; }
  double weight(int j) const { return weights_[j]; }
  /// Signed curvature, positive on convex counter-clockwise arcs.
  double curvature(int j) const { return cross(d1_[j], d2_[j]) / (speed_[j] * speed_[j] * speed_[j]); }
  const std::vector<Vec2>& points() const { return points_; }
  double perimeter() const { return perimeter_; }
  Vec2 centroid() const { return centroid_; }

  /// Smallest distance from p to the node set (accurate to the node spacing).
  double distance_to_boundary(const Vec2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& q : points_) d = std::min(d, norm(p - q));
    return d;
  }

  /// Largest arc length between consecutive nodes.
  double max_spacing() const {
    double h = 0.0;
    for (double w : weights_) h = std::max(h, w);
    return h;
  }

  bool contains(const Vec2& p) const {
    // Winding number of the node polygon around p.
    double wind = 0.0;
    const int n = size();
    for (int j = 0; j < n; ++j) {
      const Vec2 a = points_[j] - p, b = points_[(j + 1) % n] - p;
      wind += std::atan2(cross(a, b), dot(a, b));
    }
    return std::abs(wind) > pi;
  }

 private:
  Curve curve_;
  std::vector<double> params_;
  std::vector<Vec2> points_;
  std::vector<Vec2> d1_;
  std::vector<Vec2> d2_;
  std::vector<Vec2> normals_;
  std::vector<double> speed_;
  std::vector<double> weights_;
  Vec2 centroid_{};
  double perimeter_ = 0.0;
};

using MeshPtr = std::shared_ptr<const BoundaryMesh>;

inline MeshPtr build_mesh(const Shape& shape, int n_nodes) {
  return std::make_shared<const BoundaryMesh>(Curve(shape), n_nodes);
}

inline MeshPtr build_mesh(const Curve& curve, int n_nodes) {
  return std::make_shared<const BoundaryMesh>(curve, n_nodes);
}

/// Vector field sampled at the nodes of a mesh.
class BoundaryField {
 public:
  BoundaryField() = default;
  explicit BoundaryField(MeshPtr mesh) : mesh_(std::move(mesh)), values_(mesh_->size()) {}
  BoundaryField(MeshPtr mesh, std::vector<Vec2> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != mesh_->size())
      throw InvalidArgument("BoundaryField: value count does not match the mesh");
  }

  template <class F>
  static BoundaryField sample(MeshPtr mesh, F&& f) {
    BoundaryField out(mesh);
    for (int j = 0; j < mesh->size(); ++j) out.values_[j] = f(mesh->point(j), mesh->normal(j));
    return out;
  }

  const MeshPtr& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(values_.size()); }
  const Vec2& operator[](int j) const { return values_[j]; }
  Vec2& operator[](int j) { return values_[j]; }
  const std::vector<Vec2>& values() const { return values_; }

  BoundaryField& operator+=(const BoundaryField& o) {
    require_same_mesh(o);
    for (int j = 0; j < size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  BoundaryField& operator-=(const BoundaryField& o) {
    require_same_mesh(o);
    for (int j = 0; j < size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  BoundaryField& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend BoundaryField operator+(BoundaryField a, const BoundaryField& b) { return a += b; }
  friend BoundaryField operator-(BoundaryField a, const BoundaryField& b) { return a -= b; }
  friend BoundaryField operator*(double s, BoundaryField a) { return a *= s; }

  double sup_norm() const {
    double r = 0.0;
    for (const auto& v : values_) r = std::max(r, norm(v));
    return r;
  }

  /// int_{dOmega} f . g dsigma by the trapezoidal rule.
  double inner(const BoundaryField& o) const {
    require_same_mesh(o);
    double s = 0.0;
    for (int j = 0; j < size(); ++j) s += mesh_->weight(j) * dot(values_[j], o.values_[j]);
    return s;
  }

  /// int f . psi_m dsigma for the three rigid-motion generators.
  std::array<double, 3> rigid_moments() const {
    std::array<double, 3> m{};
    const auto basis = rigid_motion_basis();
    for (int j = 0; j < size(); ++j)
      for (int k = 0; k < 3; ++k) m[k] += mesh_->weight(j) * dot(values_[j], basis[k](mesh_->point(j)));
    return m;
  }

  /// Membership in L2_Psi up to `tol` (relative to the field's L2 size).
  bool equilibrated(double tol = 1e-10) const {
    const auto m = rigid_moments();
    const double scale = std::max(1.0, std::sqrt(inner(*this)));
    for (double v : m)
      if (std::abs(v) > tol * scale) return false;
    return true;
  }

  void require_same_mesh(const BoundaryField& o) const {
    if (mesh_ != o.mesh_ && (mesh_ == nullptr || o.mesh_ == nullptr || mesh_->size() != o.mesh_->size()))
      throw InvalidArgument("BoundaryField: mesh mismatch");
  }

 private:
  MeshPtr mesh_;
  std::vector<Vec2> values_;
};

/// 2x2 matrix per boundary node (columns are independent vector fields).
struct MatrixBoundaryField {
  MeshPtr mesh;
  std::vector<Matrix2> values;

  BoundaryField column(int c) const {
    std::vector<Vec2> v(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) v[j] = values[j].column(c);
    return BoundaryField(mesh, std::move(v));
  }

  static MatrixBoundaryField from_columns(const BoundaryField& c0, const BoundaryField& c1) {
    MatrixBoundaryField out{c0.mesh(), std::vector<Matrix2>(c0.size())};
    for (int j = 0; j < c0.size(); ++j) out.values[j] = Matrix2::from_columns(c0[j], c1[j]);
    return out;
  }

  /// Node-wise product with a fixed vector.
  BoundaryField apply(const Vec2& v) const {
    std::vector<Vec2> out(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) out[j] = values[j] * v;
    return BoundaryField(mesh, std::move(out));
  }

  double sup_norm() const {
    double r = 0.0;
    for (const auto& m : values) r = std::max(r, max_abs(m));
    return r;
  }
};

/// Gram matrix of the rigid motions in L2(dOmega).
inline Eigen::Matrix3d rigid_gram(const BoundaryMesh& mesh) {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  const auto basis = rigid_motion_basis();
  for (int j = 0; j < mesh.size(); ++j)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g(a, b) += mesh.weight(j) * dot(basis[a](mesh.point(j)), basis[b](mesh.point(j)));
  return g;
}

/// f minus its L2(dOmega) projection onto the rigid motions.
inline BoundaryField project_onto_L2Psi(const BoundaryField& f) {
  const auto& mesh = *f.mesh();
  const auto m = f.rigid_moments();
  const Eigen::Vector3d c = rigid_gram(mesh).ldlt().solve(Eigen::Vector3d(m[0], m[1], m[2]));
  const auto basis = rigid_motion_basis();
  BoundaryField out = f;
  for (int j = 0; j < f.size(); ++j)
    for (int k = 0; k < 3; ++k) out[j] -= c[k] * basis[k](mesh.point(j));
  return out;
}

}  // namespace crackbem
