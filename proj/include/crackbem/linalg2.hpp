#pragma once

// Fixed-size 2-vectors and 2x2 matrices used by every kernel.

#include <array>
#include <cmath>
#include <numbers>

namespace crackbem {

inline constexpr double pi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : y; }
  constexpr double& operator[](int i) { return i == 0 ? x : y; }

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return a *= 1.0 / s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }
/// Counter-clockwise rotation by 90 degrees.
constexpr Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }
inline Vec2 rotate(const Vec2& a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// 2x2 matrix, entries m[row][col].
struct Matrix2 {
  std::array<std::array<double, 2>, 2> m{};

  static constexpr Matrix2 identity() { return Matrix2{{{{1.0, 0.0}, {0.0, 1.0}}}}; }
  static constexpr Matrix2 zero() { return Matrix2{}; }
  static constexpr Matrix2 diag(double a, double b) { return Matrix2{{{{a, 0.0}, {0.0, b}}}}; }
  static constexpr Matrix2 from_rows(double a, double b, double c, double d) {
    return Matrix2{{{{a, b}, {c, d}}}};
  }
  static constexpr Matrix2 from_columns(const Vec2& c0, const Vec2& c1) {
    return Matrix2{{{{c0.x, c1.x}, {c0.y, c1.y}}}};
  }
  static Matrix2 rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return from_rows(c, -s, s, c);
  }

  constexpr double operator()(int i, int j) const { return m[i][j]; }
  constexpr double& operator()(int i, int j) { return m[i][j]; }

  constexpr Vec2 column(int j) const { return {m[0][j], m[1][j]}; }
  constexpr Vec2 row(int i) const { return {m[i][0], m[i][1]}; }

  constexpr Matrix2 transpose() const { return from_rows(m[0][0], m[1][0], m[0][1], m[1][1]); }
  constexpr double trace() const { return m[0][0] + m[1][1]; }
  constexpr double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

  constexpr Matrix2& operator+=(const Matrix2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] += o.m[i][j];
    return *this;
  }
  constexpr Matrix2& operator-=(const Matrix2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] -= o.m[i][j];
    return *this;
  }
  constexpr Matrix2& operator*=(double s) {
    for (auto& r : m)
      for (auto& v : r) v *= s;
    return *this;
  }

  friend constexpr Matrix2 operator+(Matrix2 a, const Matrix2& b) { return a += b; }
  friend constexpr Matrix2 operator-(Matrix2 a, const Matrix2& b) { return a -= b; }
  friend constexpr Matrix2 operator*(double s, Matrix2 a) { return a *= s; }
  friend constexpr Matrix2 operator*(Matrix2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(const Matrix2& a, const Vec2& v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y, a.m[1][0] * v.x + a.m[1][1] * v.y};
  }
  friend constexpr Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    Matrix2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
  }
  friend constexpr bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Largest absolute entry.
inline double max_abs(const Matrix2& a) {
  double r = 0.0;
  for (const auto& row : a.m)
    for (double v : row) r = std::max(r, std::abs(v));
  return r;
}

inline double max_abs(const Vec2& a) { return std::max(std::abs(a.x), std::abs(a.y)); }

}  // namespace crackbem
