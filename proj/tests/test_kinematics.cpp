#include <gtest/gtest.h>

#include <random>

#include "ramcell/kinematics.hpp"
#include "ramcell/toolpath.hpp"

using namespace ramcell;
using namespace ramcell::kinematics;
using geom::kPi;
using geom::Pose;
using geom::Rotation;
using geom::Vec3;

namespace {

const DHParams kDh = DHParams::ur5e();
const Pose kTcp{{0.0, 0.0, 200.0}, Rotation{}};

double wrapped_diff(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

double config_diff(const JointConfig& a, const JointConfig& b) {
  double m = 0.0;
  for (int i = 0; i < 6; ++i) m = std::max(m, wrapped_diff(a[i], b[i]));
  return m;
}

JointConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  JointConfig q;
  for (auto& v : q) v = u(rng);
  return q;
}

// Distance of the wrist center from the shoulder-singular z axis, minus d4.
double shoulder_margin(const JointConfig& q) {
  const Pose f = fk_flange(q, kDh);
  const Vec3 wrist = f.position - f.orientation.rotate({0, 0, 1}) * kDh.rows[5].d;
  return std::hypot(wrist.x, wrist.y) - kDh.rows[3].d;
}

}  // namespace

TEST(ForwardKinematics, ZeroConfigRegression) {
  // Oracle: independent 4x4 DH chain evaluated once in double precision.
  const Pose p = fk_flange({}, kDh);
  EXPECT_NEAR(p.position.x, -817.2, 1e-9);
  EXPECT_NEAR(p.position.y, -232.9, 1e-9);
  EXPECT_NEAR(p.position.z, 62.8, 1e-9);
  EXPECT_NEAR(p.orientation.angle_to(Rotation::about_x(kPi / 2)), 0.0, 1e-12);

  const Pose tcp = fk({}, kDh, kTcp);
  EXPECT_NEAR(geom::distance(tcp.position, {-817.2, -432.9, 62.8}), 0.0, 1e-9);
}

TEST(ForwardKinematics, PeriodicInEveryJoint) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = random_config(rng);
    const Pose a = fk(q, kDh, kTcp);
    for (int i = 0; i < 6; ++i) {
      auto q2 = q;
      q2[i] += 2.0 * kPi;
      const Pose b = fk(q2, kDh, kTcp);
      EXPECT_LE(geom::distance(a.position, b.position), 1e-9);
      EXPECT_LE(a.orientation.angle_to(b.orientation), 1e-9);
    }
  }
}

TEST(ForwardKinematics, ReachBound) {
  double sum = 0.0;
  for (const auto& r : kDh.rows) sum += std::abs(r.a) + std::abs(r.d);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto q = random_config(rng);
    EXPECT_LE(geom::norm(fk(q, kDh, kTcp).position), sum + 200.0);
    EXPECT_LE(geom::norm(fk_flange(q, kDh).position), max_reach(kDh) + 1e-9);
  }
}

TEST(InverseKinematics, RoundTripOnRandomPoses) {
  std::mt19937_64 rng(3);
  int checked = 0;
  while (checked < 1000) {
    const auto q = random_config(rng);
    if (manipulability(q, kDh) < 1e6 || shoulder_margin(q) < 5.0) continue;
    ++checked;
    const Pose target = fk(q, kDh, kTcp);
    const auto sols = ik(target, kDh, kTcp);
    ASSERT_FALSE(sols.empty());
    EXPECT_LE(sols.size(), 8u);
    double nearest = 1e9;
    for (const auto& s : sols.solutions) {
      const Pose back = fk(s.q, kDh, kTcp);
      EXPECT_LE(geom::distance(back.position, target.position), 1e-6);
      EXPECT_LE(back.orientation.angle_to(target.orientation), 1e-8);
      nearest = std::min(nearest, config_diff(s.q, q));
    }
    EXPECT_LE(nearest, 1e-8);
    for (std::size_t i = 1; i < sols.size(); ++i) EXPECT_LT(sols.solutions[i - 1].tag, sols.solutions[i].tag);
  }
}

TEST(InverseKinematics, TargetBeyondReachIsEmpty) {
  const Pose target{{1200.0, 0.0, 162.5}, toolpath::tool_down()};
  EXPECT_TRUE(ik(target, kDh, Pose{}).empty());
  EXPECT_LT(max_reach(kDh), 1200.0);
}

TEST(InverseKinematics, TwoElbowBranchesMatchGridSearch) {
  const JointConfig q0{0.3, -1.2, 1.1, -1.4, -1.5, 0.2};
  const Pose target = fk(q0, kDh, kTcp);
  const auto sols = ik(target, kDh, kTcp);

  // Oracle: grid over the planar elbow pair for the same shoulder and
  // wrist-center height/offset as q0, counting sign-distinct q3 solutions.
  const double a2 = kDh.rows[1].a, a3 = kDh.rows[2].a;
  const double x = a2 * std::cos(q0[1]) + a3 * std::cos(q0[1] + q0[2]);
  const double y = a2 * std::sin(q0[1]) + a3 * std::sin(q0[1] + q0[2]);
  bool up = false, down = false;
  const int n = 2000;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double t2 = -kPi + 2.0 * kPi * i / n, t3 = -kPi + 2.0 * kPi * j / n;
      const double gx = a2 * std::cos(t2) + a3 * std::cos(t2 + t3);
      const double gy = a2 * std::sin(t2) + a3 * std::sin(t2 + t3);
      if (std::hypot(gx - x, gy - y) < 3.0) (t3 > 0 ? up : down) = true;
    }
  ASSERT_TRUE(up && down);

  bool has_u = false, has_d = false;
  for (const auto& s : sols.solutions)
    if (s.tag.shoulder == 'L' || s.tag.shoulder == 'R') {
      has_u |= s.tag.elbow == 'U';
      has_d |= s.tag.elbow == 'D';
    }
  EXPECT_TRUE(has_u && has_d);
}

TEST(InverseKinematics, WristSingularityFlagsFreeParameter) {
  const JointConfig q{0.2, -1.3, 1.4, -1.7, 0.0, 0.4};
  const Pose target = fk(q, kDh, kTcp);
  const auto sols = ik(target, kDh, kTcp);
  ASSERT_FALSE(sols.empty());
  int flagged = 0;
  for (const auto& s : sols.solutions) {
    const Pose back = fk(s.q, kDh, kTcp);
    EXPECT_LE(geom::distance(back.position, target.position), 1e-6);
    if (!s.free_parameter) continue;
    ++flagged;
    EXPECT_EQ(s.tag.wrist, 'N');
    if (wrapped_diff(s.q[0], q[0]) < 1e-6 && wrapped_diff(s.q[2], q[2]) < 1e-6)
      EXPECT_LE(wrapped_diff(s.q[3] + s.q[5], q[3] + q[5]), 1e-6);
  }
  EXPECT_GE(flagged, 1);
}

TEST(SelectBranch, PrevItselfWins) {
  const JointConfig q{0.3, -1.2, 1.1, -1.4, -1.5, 0.2};
  const auto sols = ik(fk(q, kDh, kTcp), kDh, kTcp);
  const auto pick = select_branch(sols, q);
  EXPECT_LE(max_joint_distance(pick.q, q), 1e-8);
}

TEST(SelectBranch, NearestAndTieBreak) {
  IKSolutionSet s;
  s.solutions.push_back({{1.0, 0, 0, 0, 0, 0}, {'L', 'U', 'N'}, false});
  s.solutions.push_back({{0.1, 0, 0, 0, 0, 0}, {'R', 'D', 'F'}, false});
  EXPECT_EQ(select_branch(s, {}).tag.str(), "RDF");

  IKSolutionSet tie;
  tie.solutions.push_back({{0.5, 0, 0, 0, 0, 0}, {'R', 'U', 'N'}, false});
  tie.solutions.push_back({{-0.5, 0, 0, 0, 0, 0}, {'L', 'D', 'F'}, false});
  EXPECT_EQ(select_branch(tie, {}).tag.str(), "LDF");

  EXPECT_THROW(select_branch(IKSolutionSet{}, {}), UnreachableError);
}

TEST(SelectBranch, UnwrapsTowardPrevious) {
  IKSolutionSet s;
  s.solutions.push_back({{-3.1, 0, 0, 0, 0, 0}, {'L', 'U', 'N'}, false});
  const JointConfig prev{3.1, 0, 0, 0, 0, 0};
  EXPECT_NEAR(select_branch(s, prev).q[0], -3.1 + 2.0 * kPi, 1e-12);
}

TEST(SelectBranch, ContinuousAlongLines) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> px(250.0, 600.0), py(-250.0, 250.0), pz(0.0, 150.0), yaw(-kPi, kPi);
  const JointConfig home{0.0, -kPi / 2, kPi / 2, -kPi / 2, -kPi / 2, 0.0};
  int lines = 0;
  while (lines < 30) {
    const Rotation r = Rotation::about_z(yaw(rng)) * toolpath::tool_down();
    const Vec3 a{px(rng), py(rng), pz(rng)}, b{px(rng), py(rng), pz(rng)};
    const int steps = static_cast<int>(std::ceil(geom::distance(a, b)));
    std::vector<JointConfig> path;
    JointConfig prev = home;
    bool ok = true;
    for (int k = 0; k <= steps && ok; ++k) {
      const Pose target{a + (b - a) * (static_cast<double>(k) / steps), r};
      const auto sols = ik(target, kDh, kTcp);
      if (sols.empty()) {
        ok = false;
        break;
      }
      prev = select_branch(sols, prev).q;
      if (manipulability(prev, kDh) < 1e6) ok = false;
      path.push_back(prev);
    }
    if (!ok) continue;
    ++lines;
    for (std::size_t i = 1; i < path.size(); ++i) EXPECT_LT(max_joint_distance(path[i - 1], path[i]), 0.1);
  }
}

TEST(Jacobian, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = random_config(rng);
    const Jacobian j = jacobian(q, kDh);
    for (int i = 0; i < 6; ++i) {
      auto qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Pose fp = fk_flange(qp, kDh), fm = fk_flange(qm, kDh);
      const Vec3 dp = (fp.position - fm.position) * (0.5 / h);
      const Vec3 dw = (fp.orientation * fm.orientation.inverse()).log() * (0.5 / h);
      const double expected[6] = {dp.x, dp.y, dp.z, dw.x, dw.y, dw.z};
      for (int r = 0; r < 6; ++r) EXPECT_NEAR(j(r, i), expected[r], 1e-5) << "row " << r << " col " << i;
    }
  }
}

TEST(Manipulability, AgreesWithDeterminant) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = random_config(rng);
    const Jacobian j = jacobian(q, kDh);
    const double det = std::sqrt(std::abs((j * j.transpose()).determinant()));
    EXPECT_NEAR(manipulability(q, kDh), det, 1e-9 * std::max(1.0, det));
  }
}

TEST(Manipulability, AlignedWristIsSingular) {
  const JointConfig q{0.4, -1.0, 1.2, -0.7, 0.0, 0.9};
  EXPECT_LT(manipulability(q, kDh), 1e-9);
  EXPECT_TRUE(is_singular(q, kDh, 1.0));
}

TEST(Manipulability, InvariantUnderBaseRotation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> off(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    auto q = random_config(rng);
    const double m0 = manipulability(q, kDh);
    q[0] += off(rng);
    EXPECT_NEAR(manipulability(q, kDh), m0, 1e-9 * std::max(1.0, m0));
    const Jacobian j = jacobian(q, kDh);
    EXPECT_NEAR(std::abs(j.determinant()), m0, 1e-9 * std::max(1.0, m0));
  }
}
