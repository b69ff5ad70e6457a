#include <gtest/gtest.h>

#include <random>

#include "ramcell/geometry.hpp"

using namespace ramcell::geom;

namespace {

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-500.0, 500.0), unit(-1.0, 1.0);
  return {{pos(rng), pos(rng), pos(rng)}, Rotation(unit(rng), unit(rng), unit(rng), unit(rng))};
}

void expect_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

void expect_near(const Pose& a, const Pose& b, double tol) {
  expect_near(a.position, b.position, tol);
  EXPECT_LE(a.orientation.angle_to(b.orientation), tol);
}

}  // namespace

TEST(Rotation, CanonicalSign) {
  const Rotation r(-0.5, 0.5, -0.5, 0.5);
  EXPECT_GE(r.w(), 0.0);
  EXPECT_NEAR(r.w() * r.w() + r.x() * r.x() + r.y() * r.y() + r.z() * r.z(), 1.0, 1e-12);
  EXPECT_EQ(Rotation(0, -1, 0, 0), Rotation(0, 1, 0, 0));
}

TEST(Rotation, MatrixRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_pose(rng).orientation;
    EXPECT_LE(r.angle_to(Rotation::from_matrix(r.matrix())), 1e-12);
  }
}

TEST(Compose, IdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const Pose p = random_pose(rng);
  expect_near(compose(Pose::identity(), p), p, 1e-12);
  expect_near(compose(p, Pose::identity()), p, 1e-12);
}

TEST(Compose, InverseGivesIdentity) {
  std::mt19937_64 rng(2);
  const Pose p = random_pose(rng);
  expect_near(compose(p, p.inverse()), Pose::identity(), 1e-9);
}

TEST(Compose, QuarterTurnsMakeHalfTurn) {
  const Pose q{{}, Rotation::about_z(kPi / 2)};
  expect_near(compose(q, q), Pose{{}, Rotation::about_z(kPi)}, 1e-12);
}

TEST(TransformPoint, Basics) {
  expect_near(transform_point(Pose::identity(), {1, 2, 3}), {1, 2, 3}, 0.0);
  expect_near(transform_point(Pose{{10, 0, 0}, {}}, {}), {10, 0, 0}, 0.0);
  expect_near(transform_point(Pose{{}, Rotation::about_z(kPi / 2)}, {1, 0, 0}), {0, 1, 0}, 1e-9);
}

TEST(Properties, ComposeIsAssociative) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    expect_near(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9);
  }
}

TEST(Properties, TransformIsIsometry) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const Pose p = random_pose(rng);
    const Vec3 a = random_pose(rng).position, b = random_pose(rng).position;
    EXPECT_NEAR(distance(transform_point(p, a), transform_point(p, b)), distance(a, b), 1e-9);
  }
}

TEST(Slerp, Endpoints) {
  const Rotation a = Rotation::about_z(0.3), b = Rotation::about_x(1.1);
  EXPECT_LE(slerp(a, b, 0.0).angle_to(a), 1e-12);
  EXPECT_LE(slerp(a, b, 1.0).angle_to(b), 1e-12);
  EXPECT_NEAR(slerp(a, b, 0.5).angle_to(a), 0.5 * a.angle_to(b), 1e-12);
}
