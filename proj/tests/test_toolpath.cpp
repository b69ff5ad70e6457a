#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ramcell/shapes.hpp"
#include "ramcell/toolpath.hpp"

using namespace ramcell;
using namespace ramcell::toolpath;
using geom::Vec3;

namespace {

Segment seg(Vec3 a, Vec3 b, double speed = 3.0, bool extruding = true) {
  Segment s;
  s.start = a;
  s.end = b;
  s.speed = speed;
  s.extruding = extruding;
  s.uv_on = extruding;
  return s;
}

Toolpath rectangle(double speed = 3.0) {
  return shapes::generate(*shapes::builtin("rectangle-90x60"), {}, speed, {0, 0, 0});
}

double angle_diff(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * geom::kPi)); }

// Distance from p to the polyline of t.
double distance_to_path(const Vec3& p, const Toolpath& t) {
  double best = 1e300;
  for (const auto& s : t) {
    const Vec3 d = s.end - s.start;
    const double u = std::clamp(geom::dot(p - s.start, d) / geom::dot(d, d), 0.0, 1.0);
    best = std::min(best, geom::distance(p, s.start + d * u));
  }
  return best;
}

Toolpath random_path(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> step(-40.0, 40.0);
  std::bernoulli_distribution flag(0.7);
  Toolpath t;
  Vec3 at{0, 0, 1};
  while (static_cast<int>(t.size()) < n) {
    const Vec3 next = at + Vec3{step(rng), step(rng), 0.0};
    t.append(seg(at, next, 3.0, flag(rng)));
    at = next;
  }
  return t;
}

}  // namespace

TEST(Toolpath, DropsDegenerateSegments) {
  Toolpath t;
  t.append(seg({0, 0, 0}, {0, 0, 0}));
  EXPECT_TRUE(t.empty());
}

TEST(Toolpath, RejectsBadSpeedAndDecreasingLayer) {
  Toolpath t;
  EXPECT_THROW(t.append(seg({0, 0, 0}, {1, 0, 0}, 0.0)), std::invalid_argument);
  auto a = seg({0, 0, 0}, {1, 0, 0});
  a.layer = 2;
  t.append(a);
  auto b = seg({1, 0, 0}, {2, 0, 0});
  b.layer = 1;
  EXPECT_THROW(t.append(b), std::invalid_argument);
}

TEST(Extensions, SingleWallSegmentGetsEndOverrun) {
  Toolpath t;
  t.append(seg({0, 0, 1}, {50, 0, 1}));
  const auto e = add_cure_extensions(t, {});
  ASSERT_EQ(e.size(), 2u);
  const auto st = path_stats(e);
  EXPECT_DOUBLE_EQ(st.extruded_length, 50.0);
  EXPECT_DOUBLE_EQ(st.total_length, 75.0);
  EXPECT_FALSE(e[1].extruding);
  EXPECT_TRUE(e[1].uv_on);
  EXPECT_EQ(e[1].end, (Vec3{75, 0, 1}));
}

TEST(Extensions, ZeroLengthIsIdentity) {
  const auto r = rectangle();
  EXPECT_EQ(add_cure_extensions(r, {0.0, 0.5}), r);
  EXPECT_THROW(add_cure_extensions(r, {-1.0, 0.5}), std::invalid_argument);
}

TEST(Extensions, RectangleCorners) {
  const auto e = add_cure_extensions(rectangle(), {});
  const auto st = path_stats(e);
  EXPECT_DOUBLE_EQ(st.extruded_length, 300.0);
  EXPECT_DOUBLE_EQ(st.total_length, 500.0);
  int legs = 0;
  for (const auto& s : e)
    if (!s.extruding) {
      ++legs;
      EXPECT_TRUE(s.uv_on);
      EXPECT_DOUBLE_EQ(s.length(), 25.0);
    }
  EXPECT_EQ(legs, 8);
}

TEST(Extensions, ShallowTurnHasNoOverrun) {
  Toolpath t;
  t.append(seg({0, 0, 1}, {10, 0, 1}));
  t.append(seg({10, 0, 1}, {20, 3, 1}));  // ~16.7 degrees
  const auto e = add_cure_extensions(t, {});
  EXPECT_EQ(e.size(), 3u);
}

TEST(Extensions, ExtrudingSegmentsUnchanged) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_path(rng, 25);
    const auto e = add_cure_extensions(t, {});
    std::vector<Segment> before, after;
    for (const auto& s : t)
      if (s.extruding) before.push_back(s);
    for (const auto& s : e)
      if (s.extruding) after.push_back(s);
    EXPECT_EQ(before, after);
  }
}

TEST(Orientation, PlusXTrailsTowardMinusX) {
  Toolpath t;
  t.append(seg({0, 0, 1}, {10, 0, 1}));
  const auto o = assign_orientations(t, {});
  const Vec3 spot = o[0].orientation.rotate(UvOffset{}.tool_offset);
  EXPECT_NEAR(spot.x, -14.0, 1e-12);
  EXPECT_NEAR(spot.y, 0.0, 1e-12);
  EXPECT_TRUE(is_tool_down(o[0].orientation));
}

TEST(Orientation, PlusYIsQuarterTurnFromPlusX) {
  Toolpath t;
  t.append(seg({0, 0, 1}, {10, 0, 1}));
  t.append(seg({10, 0, 1}, {10, 10, 1}));
  const auto o = assign_orientations(t, {});
  EXPECT_NEAR(angle_diff(tool_yaw(o[1].orientation), tool_yaw(o[0].orientation)), geom::kPi / 2, 1e-12);
}

TEST(Orientation, RectangleHasFourYawsAtRightAngles) {
  const auto o = assign_orientations(rectangle(), {});
  ASSERT_EQ(o.size(), 4u);
  std::vector<double> yaws;
  for (const auto& s : o) yaws.push_back(tool_yaw(s.orientation));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(angle_diff(yaws[(i + 1) % 4], yaws[i]), geom::kPi / 2, 1e-12);
    for (std::size_t j = i + 1; j < 4; ++j) EXPECT_GT(angle_diff(yaws[i], yaws[j]), 1.0);
  }
}

TEST(Orientation, VerticalMoveKeepsYawAndZeroLengthThrows) {
  Toolpath t;
  t.append(seg({0, 0, 1}, {0, 10, 1}));
  t.append(seg({0, 10, 1}, {0, 10, 2}, 3.0, false));
  const auto o = assign_orientations(t, {});
  EXPECT_EQ(o[1].orientation, o[0].orientation);
  EXPECT_THROW(assign_orientations(t, {{0.0, 0.0, 5.0}}), std::invalid_argument);
}

TEST(Orientation, SpotAlwaysTrails) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> off(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_path(rng, 20);
    UvOffset uv{{off(rng), off(rng), 0.0}};
    if (geom::norm(uv.tool_offset) < 1.0) continue;
    const auto o = assign_orientations(t, uv);
    for (const auto& s : o) {
      EXPECT_TRUE(is_tool_down(s.orientation));
      const Vec3 spot = geom::horizontal(s.orientation.rotate(uv.tool_offset));
      EXPECT_LT(geom::dot(spot, s.end - s.start), 0.0);
    }
  }
}

TEST(Resample, TenMillimetersAtThree) {
  Toolpath t;
  t.append(seg({0, 0, 0}, {10, 0, 0}));
  const auto r = resample(t, 3.0);
  ASSERT_EQ(r.size(), 4u);
  for (const auto& s : r) EXPECT_NEAR(s.length(), 2.5, 1e-12);
  EXPECT_EQ(r[3].end, t[0].end);
}

TEST(Resample, LongStepIsIdentity) {
  const auto r = rectangle();
  EXPECT_EQ(resample(r, 1000.0), r);
  EXPECT_THROW(resample(r, 0.0), std::invalid_argument);
}

TEST(Resample, RectangleAtOneMillimeter) {
  const auto r = resample(rectangle(), 1.0);
  EXPECT_EQ(std::count_if(r.begin(), r.end(), [](const Segment& s) { return s.extruding; }), 300);
}

TEST(Resample, IsARefinement) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> step(0.1, 7.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_path(rng, 15);
    const double h = step(rng);
    const auto r = resample(t, h);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) EXPECT_EQ(r[i].end, r[i + 1].start);
    for (const auto& s : r) {
      EXPECT_LE(s.length(), h + 1e-9);
      EXPECT_LE(distance_to_path(s.start, t), 1e-9);
    }
    for (const auto& s : t) EXPECT_LE(distance_to_path(s.end, r), 1e-9);
  }
}

TEST(Stats, RectangleAtThreeMillimetersPerSecond) {
  const auto st = path_stats(rectangle(3.0));
  EXPECT_DOUBLE_EQ(st.extruded_length, 300.0);
  EXPECT_DOUBLE_EQ(st.extrusion_time, 100.0);
  EXPECT_EQ(st.layer_count, 1);
}

TEST(Stats, EmptyPath) {
  const auto st = path_stats({});
  EXPECT_EQ(st.total_length, 0.0);
  EXPECT_EQ(st.extruded_length, 0.0);
  EXPECT_EQ(st.extrusion_time, 0.0);
  EXPECT_EQ(st.layer_count, 0);
}

TEST(Stats, TenLayerSquare) {
  const auto sq = shapes::generate({shapes::ShapeKind::square, 30, 30, 8.5}, {}, 4.0, {});
  const auto st = path_stats(sq);
  EXPECT_NEAR(st.extruded_length, 1200.0, 1e-9);
  EXPECT_EQ(st.layer_count, 10);
}

TEST(Timeline, RectangleWithReorientation) {
  const auto o = assign_orientations(add_cure_extensions(rectangle(3.0), {}), {});
  const Timeline tl(o, {1.0});
  double move_time = 0.0, turn = 0.0;
  for (const auto& ph : tl.phases()) {
    if (ph.kind == Phase::Kind::move) {
      move_time += ph.t1 - ph.t0;
    } else {
      EXPECT_FALSE(ph.extruding);
      EXPECT_LE(std::abs(ph.yaw1), geom::kPi + 1e-12);
      turn += ph.t1 - ph.t0;
    }
  }
  EXPECT_NEAR(move_time, 500.0 / 3.0, 1e-9);
  EXPECT_NEAR(tl.duration(), move_time + turn, 1e-9);
  EXPECT_GT(turn, 0.0);
  // Nozzle position follows the path.
  for (double t = 0.0; t <= tl.duration(); t += 0.37) EXPECT_LE(distance_to_path(tl.at(t).position, o), 1e-9);
  EXPECT_EQ(tl.at(tl.segment_time(0, 0.5)).position, (Vec3{0, -30, 1}));
}

TEST(Timeline, RejectsGaps) {
  Toolpath t;
  t.append(seg({0, 0, 0}, {1, 0, 0}));
  t.append(seg({2, 0, 0}, {3, 0, 0}));
  EXPECT_THROW(Timeline(t, {}), std::invalid_argument);
}
