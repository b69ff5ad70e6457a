#include <gtest/gtest.h>

#include <random>

#include "ramcell/extrusion.hpp"
#include "support.hpp"

using namespace ramcell;
using namespace ramcell::extrusion;

namespace {

bool extruding_between(const toolpath::Timeline& tl, double a, double b) {
  return tl.at(0.5 * (a + b)).extruding;
}

}  // namespace

TEST(BeadArea, PaperFlowAtTwoDimensionalSpeed) {
  EXPECT_NEAR(bead_area(5.3, 3.0), 1.766667, 1e-6);
  const double nozzle = Nozzle{}.area();
  EXPECT_NEAR(nozzle, 1.767146, 1e-6);
  EXPECT_LT(std::abs(bead_area(5.3, 3.0) - nozzle) / nozzle, 0.005);
  EXPECT_DOUBLE_EQ(bead_area(5.3, 4.0), 1.325);
  EXPECT_THROW(bead_area(5.3, 0.0), std::invalid_argument);
  EXPECT_THROW(bead_area(5.3, -1.0), std::invalid_argument);
}

TEST(BeadArea, TimesSpeedIsFlow) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> q(0.1, 50.0), v(0.1, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double qq = q(rng), vv = v(rng);
    EXPECT_NEAR(bead_area(qq, vv) * vv, qq, 1e-12 * qq);
  }
}

TEST(StepRate, DefaultDriveTrain) {
  const DriveTrain d;
  // Plunger speed 5.3 / (pi 20^2) mm/s at 200 steps per mm.
  EXPECT_NEAR(step_rate(5.3, d), 0.843521, 1e-6);
  EXPECT_EQ(step_rate(0.0, d), 0.0);
  EXPECT_DOUBLE_EQ(step_rate(10.6, d), 2.0 * step_rate(5.3, d));
  EXPECT_NEAR(d.volume_per_step(), 6.283185, 1e-6);
}

TEST(DriveTrain, CapacityMustMatchTravel) {
  DriveTrain d;
  EXPECT_NO_THROW(d.validate());
  d.plunger_travel = 100.0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d = DriveTrain{};
  d.efficiency = 1.5;
  EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(Schedule, RectangleVolume) {
  const auto path = fixtures::specimen("rectangle-90x60");
  const toolpath::Timeline tl(path, {});
  const auto s = schedule(tl, {}, {});
  EXPECT_NEAR(s.total_steps() * DriveTrain{}.volume_per_step(), 530.0, 0.53);
}

TEST(Schedule, NoExtrusionMeansNoSteps) {
  auto t = fixtures::line({0, 0, 1}, {10, 0, 1}, 3.0, false);
  toolpath::Segment uv;
  uv.start = {10, 0, 1};
  uv.end = {20, 0, 1};
  uv.uv_on = true;
  uv.speed = 3.0;
  uv.layer = t[0].layer;
  t.append(uv);
  const auto s = schedule(t, {}, {});
  EXPECT_EQ(s.total_steps(), 0.0);
  ASSERT_EQ(s.events.size(), 2u);
  for (const auto& e : s.events) EXPECT_EQ(e.channel, Channel::uv);
  EXPECT_DOUBLE_EQ(s.events[0].time, 10.0 / 3.0);
  EXPECT_TRUE(s.events[0].on);
  EXPECT_FALSE(s.events[1].on);
}

TEST(Schedule, RateIndependentOfSpeed) {
  auto t = fixtures::line({0, 0, 1}, {30, 0, 1}, 3.0);
  toolpath::Segment b = t[0];
  b.start = {30, 0, 1};
  b.end = {70, 0, 1};
  b.speed = 4.0;
  t.append(b);
  const auto s = schedule(t, {}, {});
  ASSERT_EQ(s.points.size(), 2u);  // one constant-rate stretch
  EXPECT_DOUBLE_EQ(s.points[1].time, 20.0);
  EXPECT_NEAR(s.points[1].steps, 20.0 * step_rate(5.3, {}), 1e-9);
  EXPECT_NEAR(s.steps_at(5.0) / 5.0, s.steps_at(15.0) / 15.0, 1e-12);
}

TEST(Schedule, MotorLimit) {
  DriveTrain d;
  d.max_step_rate = 0.5;
  EXPECT_THROW(schedule(fixtures::line({0, 0, 1}, {10, 0, 1}, 3.0), {}, d), MotorLimitError);
}

TEST(Schedule, Invariants) {
  for (const char* id : {"rectangle-90x60", "wall-50x10", "square-30x30x8.5"}) {
    const toolpath::Timeline tl(fixtures::specimen(id), {});
    const auto s = schedule(tl, {}, {});
    const double rate = step_rate(5.3, {});
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      EXPECT_GT(s.points[i].time, s.points[i - 1].time);
      EXPECT_GE(s.points[i].steps, s.points[i - 1].steps);
      const double dt = s.points[i].time - s.points[i - 1].time;
      const double expected = extruding_between(tl, s.points[i - 1].time, s.points[i].time) ? rate * dt : 0.0;
      EXPECT_NEAR(s.points[i].steps - s.points[i - 1].steps, expected, 1e-6);
    }
    int open = 0;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      if (i > 0) {
        EXPECT_GE(s.events[i].time, s.events[i - 1].time);
        // Steps between events equal rate x extruding time within one step.
        const double a = s.events[i - 1].time, b = s.events[i].time;
        const double expected = extruding_between(tl, a, b) ? rate * (b - a) : 0.0;
        if (b > a) EXPECT_NEAR(s.steps_at(b) - s.steps_at(a), expected, 1.0);
      }
      if (s.events[i].channel != Channel::extruder) continue;
      open += s.events[i].on ? 1 : -1;
      EXPECT_GE(open, 0);
      EXPECT_LE(open, 1);
    }
    EXPECT_EQ(open, 0);
    const auto stats = toolpath::path_stats(tl.path());
    EXPECT_NEAR(s.total_steps() * DriveTrain{}.volume_per_step(), 5.3 * stats.extrusion_time,
                1e-3 * 5.3 * stats.extrusion_time);
  }
}

TEST(Schedule, CsvExport) {
  const auto s = schedule(fixtures::line({0, 0, 1}, {6, 0, 1}, 3.0), {}, {});
  EXPECT_EQ(steps_csv(s), "time_s,cumulative_steps\n0,0\n2,1.687042\n");
  EXPECT_EQ(events_csv(s), "time_s,channel,state\n0,extruder,on\n0,uv,on\n2,extruder,off\n2,uv,off\n");
}

TEST(Feasibility, LowViscosityResin) {
  const auto f = drive_feasibility(10.0, {}, {}, {});
  EXPECT_NEAR(f.pressure, 4265.51, 0.01);
  EXPECT_NEAR(f.force, 5.36020, 1e-5);
  EXPECT_NEAR(f.torque, 0.0136496, 1e-7);
  EXPECT_GT(f.margin, 100.0);
}

TEST(Feasibility, LimitsAndLinearity) {
  const auto tiny = drive_feasibility(1e-300, {}, {}, {});
  EXPECT_LT(tiny.torque, 1e-290);
  EXPECT_GT(tiny.margin, 1e280);
  EXPECT_NEAR(drive_feasibility(20.0, {}, {}, {}).torque, 2.0 * drive_feasibility(10.0, {}, {}, {}).torque, 1e-15);
  EXPECT_THROW(drive_feasibility(0.0, {}, {}, {}), std::invalid_argument);
  try {
    drive_feasibility(5000.0, {}, {}, {});
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NEAR(e.torque(), 500.0 * 0.0136496, 1e-4);
  }
}
