#pragma once

#include <array>
#include <cmath>

namespace ramcell::geom {

inline constexpr double kPi = 3.14159265358979323846;

/// Cartesian 3-vector. Positions are in millimeters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
/// Unit vector along v. Returns the zero vector when |v| is zero.
Vec3 normalized(const Vec3& v);
/// Horizontal (xy) projection.
constexpr Vec3 horizontal(const Vec3& v) { return {v.x, v.y, 0.0}; }

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Unit quaternion rotation, stored canonically with w >= 0.
class Rotation {
 public:
  Rotation() = default;
  /// Normalizes and canonicalizes the given quaternion.
  Rotation(double w, double x, double y, double z);

  static Rotation identity() { return {}; }
  static Rotation axis_angle(const Vec3& axis, double angle);
  static Rotation about_x(double angle) { return axis_angle({1, 0, 0}, angle); }
  static Rotation about_y(double angle) { return axis_angle({0, 1, 0}, angle); }
  static Rotation about_z(double angle) { return axis_angle({0, 0, 1}, angle); }
  static Rotation from_matrix(const Mat3& m);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Rotation operator*(const Rotation& o) const;
  Vec3 rotate(const Vec3& v) const;
  Rotation inverse() const { return {w_, -x_, -y_, -z_}; }
  Mat3 matrix() const;
  /// Rotation vector (axis * angle), angle in [0, pi].
  Vec3 log() const;
  /// Geodesic angle to another rotation, in [0, pi].
  double angle_to(const Rotation& o) const;

  bool operator==(const Rotation&) const = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Spherical interpolation along the shortest arc.
Rotation slerp(const Rotation& a, const Rotation& b, double s);

/// Rigid transform: rotate, then translate.
struct Pose {
  Vec3 position;
  Rotation orientation;

  static Pose identity() { return {}; }
  Pose inverse() const;
  bool operator==(const Pose&) const = default;
};

/// Rigid-body composition a∘b: the frame b expressed in a's parent frame.
Pose compose(const Pose& a, const Pose& b);
Vec3 transform_point(const Pose& p, const Vec3& v);

}  // namespace ramcell::geom
