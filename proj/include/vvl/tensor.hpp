#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace vvl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// General 2x2 matrix. For gradients the convention is (i, j) = d_j v_i.
struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  double trace() const { return xx + yy; }
  Mat2 transpose() const { return {xx, yx, xy, yy}; }
  Mat2& operator+=(const Mat2& o) { xx += o.xx; xy += o.xy; yx += o.yx; yy += o.yy; return *this; }
  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) { return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy}; }
  friend Mat2 operator*(double s, const Mat2& a) { return {s * a.xx, s * a.xy, s * a.yx, s * a.yy}; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline Vec2 operator*(const Mat2& a, Vec2 v) { return {a.xx * v.x + a.xy * v.y, a.yx * v.x + a.yy * v.y}; }

/// Symmetric 2x2 tensor stored by its three independent entries.
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  static Sym2 identity() { return {1.0, 0.0, 1.0}; }
  static Sym2 outer(Vec2 a) { return {a.x * a.x, a.x * a.y, a.y * a.y}; }
  double trace() const { return xx + yy; }
  Sym2& operator+=(const Sym2& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }
  Sym2& operator-=(const Sym2& o) { xx -= o.xx; xy -= o.xy; yy -= o.yy; return *this; }
  friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
  friend Sym2 operator-(const Sym2& a) { return {-a.xx, -a.xy, -a.yy}; }
  friend Sym2 operator*(double s, const Sym2& a) { return {s * a.xx, s * a.xy, s * a.yy}; }
  friend bool operator==(const Sym2&, const Sym2&) = default;
};

inline Vec2 operator*(const Sym2& a, Vec2 v) { return {a.xx * v.x + a.xy * v.y, a.xy * v.x + a.yy * v.y}; }

/// Frobenius contraction A : B = sum_ij A_ij B_ij.
inline double contract(const Sym2& a, const Mat2& b) { return a.xx * b.xx + a.xy * (b.xy + b.yx) + a.yy * b.yy; }
inline double contract(const Sym2& a, const Sym2& b) { return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy; }
inline double contract(const Mat2& a, const Mat2& b) { return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy; }
inline double frobenius(const Sym2& a) { return std::sqrt(contract(a, a)); }
inline double frobenius(const Mat2& a) { return std::sqrt(contract(a, a)); }

/// Eigenvalues in ascending order, closed form.
inline std::array<double, 2> eigenvalues(const Sym2& a) {
  const double mean = 0.5 * (a.xx + a.yy);
  const double half_diff = 0.5 * (a.xx - a.yy);
  const double radius = std::hypot(half_diff, a.xy);
  return {mean - radius, mean + radius};
}

inline Sym2 symmetric_part(const Mat2& a) { return {a.xx, 0.5 * (a.xy + a.yx), a.yy}; }

}  // namespace vvl
