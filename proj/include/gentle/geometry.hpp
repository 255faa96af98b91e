#pragma once

#include <cmath>
#include <cstdlib>

namespace gentle {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double norm2(const Vec3& v) { return dot(v, v); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n < 1e-14) return {0.0, 0.0, 0.0};
  return v / n;
}

// Unit quaternion, (w, x, y, z) order.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double norm(const Quat& q) {
  return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

inline Quat normalized(const Quat& q) {
  const double n = norm(q);
  if (n < 1e-14) return Quat{};
  return Quat{q.w / n, q.x / n, q.y / n, q.z / n};
}

inline Quat conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat quat_from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 u = normalized(axis);
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return normalized(Quat{std::cos(h), u.x * s, u.y * s, u.z * s});
}

inline Vec3 rotate(const Quat& q, const Vec3& v) {
  // q v q* expanded via the cross-product form.
  const Vec3 u{q.x, q.y, q.z};
  const Vec3 t = cross(u, v) * 2.0;
  return v + t * q.w + cross(u, t);
}

// Angle of the rotation taking a to b, in [0, pi].
inline double quat_angle(const Quat& q) {
  const double w = std::min(1.0, std::abs(q.w / norm(q)));
  return 2.0 * std::acos(w);
}

// Rigid transform: rotate then translate.
struct Pose {
  Vec3 position;
  Quat orientation;

  Pose() = default;
  Pose(const Vec3& p, const Quat& q) : position(p), orientation(normalized(q)) {}

  static Pose identity() { return Pose{}; }
  static Pose from_translation(const Vec3& p) { return Pose{p, Quat{}}; }

  Vec3 apply(const Vec3& v) const { return rotate(orientation, v) + position; }
};

inline Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.position = rotate(a.orientation, b.position) + a.position;
  out.orientation = normalized(a.orientation * b.orientation);
  return out;
}

inline Pose inverse(const Pose& p) {
  Pose out;
  out.orientation = conjugate(p.orientation);
  out.position = rotate(out.orientation, -p.position);
  return out;
}

// Axis-aligned box, min <= max componentwise.
struct Aabb {
  Vec3 min;
  Vec3 max;

  bool valid() const {
    return min.x <= max.x && min.y <= max.y && min.z <= max.z;
  }
  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
  Aabb inflated(double m) const {
    return {{min.x - m, min.y - m, min.z - m}, {max.x + m, max.y + m, max.z + m}};
  }
};

}  // namespace gentle
