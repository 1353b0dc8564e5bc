#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace caustic {

/// A point (u, v) of the parameter domain.
struct ParamPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ParamPoint& p) {
  return os << '(' << p.u << ", " << p.v << ')';
}

/// Parameter-space vector.
struct Vec2 {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }
inline Vec2 operator-(Vec2 a) { return {-a.u, -a.v}; }
inline double dot(Vec2 a, Vec2 b) { return a.u * b.u + a.v * b.v; }
inline double norm(Vec2 a) { return std::hypot(a.u, a.v); }
/// det of the 2x2 matrix with columns a, b.
inline double det(Vec2 a, Vec2 b) { return a.u * b.v - a.v * b.u; }
/// Rotation by +90 degrees.
inline Vec2 perp(Vec2 a) { return {-a.v, a.u}; }

inline ParamPoint operator+(ParamPoint p, Vec2 d) { return {p.u + d.u, p.v + d.v}; }
inline Vec2 operator-(ParamPoint a, ParamPoint b) { return {a.u - b.u, a.v - b.v}; }

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double det(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

}  // namespace caustic
