#include "ramcell/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace ramcell::kinematics {

namespace {

using Mat4 = Eigen::Matrix4d;
using geom::kPi;
using geom::Rotation;
using geom::Vec3;

Mat4 dh_transform(const DHRow& r, double theta) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(r.alpha), sa = std::sin(r.alpha);
  Mat4 m;
  m << ct, -st * ca, st * sa, r.a * ct,  //
      st, ct * ca, -ct * sa, r.a * st,   //
      0.0, sa, ca, r.d,                  //
      0.0, 0.0, 0.0, 1.0;
  return m;
}

Mat4 to_matrix(const Pose& p) {
  const auto r = p.orientation.matrix();
  Mat4 m = Mat4::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = r[i][j];
  m(0, 3) = p.position.x;
  m(1, 3) = p.position.y;
  m(2, 3) = p.position.z;
  return m;
}

Pose to_pose(const Mat4& m) {
  geom::Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m(i, j);
  return {{m(0, 3), m(1, 3), m(2, 3)}, Rotation::from_matrix(r)};
}

double wrap(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Mat4 inverse_rigid(const Mat4& m) {
  Mat4 inv = Mat4::Identity();
  inv.topLeftCorner<3, 3>() = m.topLeftCorner<3, 3>().transpose();
  inv.topRightCorner<3, 1>() = -inv.topLeftCorner<3, 3>() * m.topRightCorner<3, 1>();
  return inv;
}

// Per-frame transforms 0..6 (frame 0 = base).
std::array<Mat4, 7> frames(const JointConfig& q, const DHParams& dh) {
  std::array<Mat4, 7> f;
  f[0] = Mat4::Identity();
  for (int i = 0; i < 6; ++i) f[i + 1] = f[i] * dh_transform(dh.rows[i], q[i]);
  return f;
}

Eigen::Matrix<double, 6, 1> pose_error(const Pose& target, const Pose& current) {
  Eigen::Matrix<double, 6, 1> e;
  const Vec3 dp = target.position - current.position;
  const Vec3 dr = (target.orientation * current.orientation.inverse()).log();
  e << dp.x, dp.y, dp.z, dr.x, dr.y, dr.z;
  return e;
}

bool matches(const Pose& a, const Pose& b) {
  return geom::distance(a.position, b.position) <= 1e-6 && a.orientation.angle_to(b.orientation) <= 1e-8;
}

}  // namespace

DHParams DHParams::ur5e() {
  DHParams p;
  p.rows = {{{0.0, 162.5, kPi / 2},
             {-425.0, 0.0, 0.0},
             {-392.2, 0.0, 0.0},
             {0.0, 133.3, kPi / 2},
             {0.0, 99.7, -kPi / 2},
             {0.0, 99.6, 0.0}}};
  return p;
}

JointLimits JointLimits::ur_default() {
  JointLimits l;
  l.lower.fill(-2.0 * kPi);
  l.upper.fill(2.0 * kPi);
  return l;
}

bool JointLimits::contains(const JointConfig& q) const {
  for (int i = 0; i < 6; ++i)
    if (q[i] < lower[i] || q[i] > upper[i]) return false;
  return true;
}

Pose fk_flange(const JointConfig& q, const DHParams& dh) { return to_pose(frames(q, dh)[6]); }

Pose fk(const JointConfig& q, const DHParams& dh, const Pose& tcp_offset) {
  return geom::compose(fk_flange(q, dh), tcp_offset);
}

Jacobian jacobian(const JointConfig& q, const DHParams& dh) {
  const auto f = frames(q, dh);
  const Eigen::Vector3d pe = f[6].topRightCorner<3, 1>();
  Jacobian j;
  for (int i = 0; i < 6; ++i) {
    const Eigen::Vector3d z = f[i].block<3, 1>(0, 2);
    const Eigen::Vector3d p = f[i].topRightCorner<3, 1>();
    j.block<3, 1>(0, i) = z.cross(pe - p);
    j.block<3, 1>(3, i) = z;
  }
  return j;
}

double manipulability(const JointConfig& q, const DHParams& dh) {
  // Closed-form |det J| for the UR joint layout (a1 = d2 = d3 = a4 = a5 = a6 = 0).
  const double a2 = dh.rows[1].a, a3 = dh.rows[2].a, d5 = dh.rows[4].d;
  const double q23 = q[1] + q[2];
  const double reach = std::cos(q[1]) * a2 + std::cos(q23) * a3 + std::sin(q23 + q[3]) * d5;
  return std::abs(std::sin(q[2]) * std::sin(q[4]) * a2 * a3 * reach);
}

bool is_singular(const JointConfig& q, const DHParams& dh, double eps) { return manipulability(q, dh) < eps; }

double max_reach(const DHParams& dh) {
  double planar = 0.0;
  for (int i = 1; i < 6; ++i)
    if (i != 3) planar += std::abs(dh.rows[i].a) + std::abs(dh.rows[i].d);
  return std::abs(dh.rows[0].d) + std::hypot(planar, dh.rows[3].d);
}

double max_joint_distance(const JointConfig& a, const JointConfig& b) {
  double m = 0.0;
  for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

IKSolutionSet ik(const Pose& target, const DHParams& dh, const Pose& tcp_offset) {
  IKSolutionSet out;
  const Pose flange = geom::compose(target, tcp_offset.inverse());
  if (geom::norm(flange.position) > max_reach(dh) + 1e-6) return out;

  const double a2 = dh.rows[1].a, a3 = dh.rows[2].a;
  const double d4 = dh.rows[3].d, d6 = dh.rows[5].d;
  const Mat4 t06 = to_matrix(flange);
  const Eigen::Vector3d p06 = t06.topRightCorner<3, 1>();
  const Eigen::Vector3d x6 = t06.block<3, 1>(0, 0), y6 = t06.block<3, 1>(0, 1), z6 = t06.block<3, 1>(0, 2);
  const Eigen::Vector3d p05 = p06 - d6 * z6;

  const double r = std::hypot(p05.x(), p05.y());
  if (r < std::abs(d4) || r == 0.0) return out;
  const double phi = std::atan2(p05.y(), p05.x());
  const double psi = std::asin(std::clamp(d4 / r, -1.0, 1.0));

  const std::array<std::pair<char, double>, 2> shoulders{{{'L', phi + psi}, {'R', phi + kPi - psi}}};
  for (const auto& [stag, q1] : shoulders) {
    const Eigen::Vector3d z1(std::sin(q1), -std::cos(q1), 0.0);
    const double c5 = (p06.dot(z1) - d4) / d6;
    if (std::abs(c5) > 1.0 + 1e-9) continue;
    const double q5abs = std::acos(std::clamp(c5, -1.0, 1.0));
    for (const char wtag : {'N', 'F'}) {
      const double q5 = wtag == 'N' ? q5abs : -q5abs;
      const double s5 = std::sin(q5);
      const bool singular = std::abs(s5) < 1e-6;
      if (singular && wtag == 'F') continue;
      const double q6 = singular ? 0.0 : std::atan2(-y6.dot(z1) / s5, x6.dot(z1) / s5);

      const Mat4 t14 = inverse_rigid(dh_transform(dh.rows[0], q1)) * t06 *
                       inverse_rigid(dh_transform(dh.rows[5], q6)) * inverse_rigid(dh_transform(dh.rows[4], q5));
      const double px = t14(0, 3), py = t14(1, 3);
      const double c3 = (px * px + py * py - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
      if (std::abs(c3) > 1.0 + 1e-9) continue;
      const double q3abs = std::acos(std::clamp(c3, -1.0, 1.0));
      const double theta234 = std::atan2(t14(1, 0), t14(0, 0));
      for (const char etag : {'U', 'D'}) {
        const double q3 = etag == 'U' ? q3abs : -q3abs;
        const double q2 = std::atan2(py, px) - std::atan2(a3 * std::sin(q3), a2 + a3 * std::cos(q3));
        const double q4 = theta234 - q2 - q3;
        IKSolution sol;
        sol.q = {wrap(q1), wrap(q2), wrap(q3), wrap(q4), wrap(q5), wrap(q6)};
        sol.tag = {stag, etag, wtag};
        sol.free_parameter = singular;

        // Newton refinement against the flange target.
        for (int it = 0; it < 4; ++it) {
          const auto e = pose_error(flange, fk_flange(sol.q, dh));
          if (e.norm() < 1e-13) break;
          const Jacobian j = jacobian(sol.q, dh);
          const Eigen::Matrix<double, 6, 1> dq = j.completeOrthogonalDecomposition().solve(e);
          for (int k = 0; k < 6; ++k) sol.q[k] = wrap(sol.q[k] + dq[k]);
        }
        if (matches(fk(sol.q, dh, tcp_offset), target)) out.solutions.push_back(sol);
      }
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const IKSolution& a, const IKSolution& b) { return a.tag < b.tag; });
  return out;
}

IKSolution select_branch(const IKSolutionSet& sols, const JointConfig& prev, const JointLimits& limits) {
  if (sols.empty()) throw UnreachableError("no inverse kinematics solution");
  const IKSolution* best = nullptr;
  IKSolution best_shifted;
  double best_dist = 0.0;
  for (const auto& s : sols.solutions) {
    IKSolution shifted = s;
    for (int j = 0; j < 6; ++j) {
      double pick = s.q[j];
      double pick_dist = std::abs(pick - prev[j]);
      for (int k = -3; k <= 3; ++k) {
        const double c = s.q[j] + 2.0 * kPi * k;
        if (c < limits.lower[j] || c > limits.upper[j]) continue;
        if (std::abs(c - prev[j]) < pick_dist) {
          pick = c;
          pick_dist = std::abs(c - prev[j]);
        }
      }
      shifted.q[j] = pick;
    }
    if (!limits.contains(shifted.q)) continue;
    const double d = max_joint_distance(shifted.q, prev);
    if (!best || d < best_dist - 1e-12 || (std::abs(d - best_dist) <= 1e-12 && s.tag < best->tag)) {
      best = &s;
      best_shifted = shifted;
      best_dist = d;
    }
  }
  if (!best) throw UnreachableError("no solution within joint limits");
  return best_shifted;
}

}  // namespace ramcell::kinematics
