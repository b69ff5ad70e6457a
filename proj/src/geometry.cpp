#include "ramcell/geometry.hpp"

#include <algorithm>

namespace ramcell::geom {

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n == 0.0) return {};
  return v / n;
}

Rotation::Rotation(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n == 0.0) return;
  // Canonical sign: w > 0, or the first non-zero vector component > 0 when w == 0.
  double sign = w < 0.0 ? -1.0 : 1.0;
  if (w == 0.0) {
    const double lead = x != 0.0 ? x : (y != 0.0 ? y : z);
    sign = lead < 0.0 ? -1.0 : 1.0;
  }
  const double s = sign / n;
  w_ = w * s;
  x_ = x * s;
  y_ = y * s;
  z_ = z * s;
}

Rotation Rotation::axis_angle(const Vec3& axis, double angle) {
  const Vec3 u = normalized(axis);
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), u.x * s, u.y * s, u.z * s};
}

Rotation Rotation::from_matrix(const Mat3& m) {
  // Shepperd's method: pick the largest diagonal term for stability.
  const double tr = m[0][0] + m[1][1] + m[2][2];
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    return {0.25 * s, (m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s};
  }
  if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
    const double s = 2.0 * std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]);
    return {(m[2][1] - m[1][2]) / s, 0.25 * s, (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s};
  }
  if (m[1][1] > m[2][2]) {
    const double s = 2.0 * std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]);
    return {(m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s, 0.25 * s, (m[1][2] + m[2][1]) / s};
  }
  const double s = 2.0 * std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]);
  return {(m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s, 0.25 * s};
}

Rotation Rotation::operator*(const Rotation& o) const {
  return {w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
          w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
          w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
          w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_};
}

Vec3 Rotation::rotate(const Vec3& v) const {
  // v' = v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u{x_, y_, z_};
  const Vec3 t = cross(u, v) * 2.0;
  return v + t * w_ + cross(u, t);
}

Mat3 Rotation::matrix() const {
  const double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  return {{{1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy)},
           {2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx)},
           {2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy)}}};
}

Vec3 Rotation::log() const {
  const Vec3 u{x_, y_, z_};
  const double s = norm(u);
  if (s < 1e-300) return {};
  const double angle = 2.0 * std::atan2(s, w_);
  return u * (angle / s);
}

double Rotation::angle_to(const Rotation& o) const { return norm((inverse() * o).log()); }

Rotation slerp(const Rotation& a, const Rotation& b, double s) {
  const Vec3 delta = (a.inverse() * b).log();
  const double angle = norm(delta);
  if (angle == 0.0) return a;
  return a * Rotation::axis_angle(delta, angle * s);
}

Pose Pose::inverse() const {
  const Rotation inv = orientation.inverse();
  return {-inv.rotate(position), inv};
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.position + a.orientation.rotate(b.position), a.orientation * b.orientation};
}

Vec3 transform_point(const Pose& p, const Vec3& v) { return p.position + p.orientation.rotate(v); }

}  // namespace ramcell::geom
