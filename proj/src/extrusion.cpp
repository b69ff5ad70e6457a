#include "ramcell/extrusion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ramcell/text.hpp"

namespace ramcell::extrusion {

double Nozzle::area() const { return geom::kPi * 0.25 * diameter * diameter; }

double DriveTrain::bore_area() const { return geom::kPi * 0.25 * bore_diameter * bore_diameter; }

double DriveTrain::steps_per_mm() const { return static_cast<double>(full_steps) * microsteps / lead; }

double DriveTrain::volume_per_step() const { return bore_area() / steps_per_mm(); }

void DriveTrain::validate() const {
  if (!(bore_diameter > 0.0 && capacity_ml > 0.0 && plunger_travel > 0.0 && lead > 0.0 && full_steps > 0 &&
        microsteps > 0 && efficiency > 0.0 && efficiency <= 1.0 && rated_torque > 0.0 && max_step_rate > 0.0))
    throw std::invalid_argument("drive train values must be positive (efficiency in (0, 1])");
  const double swept_ml = plunger_travel * bore_area() / 1000.0;
  if (std::abs(swept_ml - capacity_ml) > 0.05 * capacity_ml)
    throw std::invalid_argument(
        fmt::format("syringe capacity {} mL disagrees with plunger travel x bore ({:.1f} mL)", capacity_ml, swept_ml));
}

double StepSchedule::steps_at(double t) const {
  if (points.empty() || t <= points.front().time) return points.empty() ? 0.0 : points.front().steps;
  if (t >= points.back().time) return points.back().steps;
  auto it = std::upper_bound(points.begin(), points.end(), t, [](double v, const StepPoint& p) { return v < p.time; });
  const StepPoint& b = *it;
  const StepPoint& a = *(it - 1);
  return a.steps + (b.steps - a.steps) * (t - a.time) / (b.time - a.time);
}

double bead_area(double flow, double speed) {
  if (!(speed > 0.0)) throw std::invalid_argument("travel speed must be positive");
  return flow / speed;
}

double step_rate(double flow, const DriveTrain& d) { return flow / d.bore_area() * d.steps_per_mm(); }

StepSchedule schedule(const toolpath::Timeline& tl, const FlowModel& f, const DriveTrain& d) {
  if (!(f.rate > 0.0)) throw std::invalid_argument("flow rate must be positive");
  d.validate();
  const double rate = step_rate(f.rate, d);
  if (rate > d.max_step_rate)
    throw MotorLimitError(fmt::format("step rate {:.1f}/s exceeds driver limit {:.1f}/s", rate, d.max_step_rate));

  StepSchedule s;
  const auto& phases = tl.phases();
  if (phases.empty()) return s;

  // One breakpoint per timed phase, then drop interior points where the rate
  // does not change.
  std::vector<StepPoint> raw{{0.0, 0.0}};
  std::vector<bool> raw_on;
  double steps = 0.0;
  bool extruding = false, uv = false;
  for (const auto& ph : phases) {
    if (ph.extruding != extruding) {
      s.events.push_back({ph.t0, Channel::extruder, ph.extruding});
      extruding = ph.extruding;
    }
    if (ph.uv_on != uv) {
      s.events.push_back({ph.t0, Channel::uv, ph.uv_on});
      uv = ph.uv_on;
    }
    if (!(ph.t1 > ph.t0)) continue;
    if (ph.extruding) steps += rate * (ph.t1 - ph.t0);
    raw.push_back({ph.t1, steps});
    raw_on.push_back(ph.extruding);
  }
  s.points.push_back(raw.front());
  for (std::size_t i = 1; i < raw.size(); ++i)
    if (i + 1 == raw.size() || raw_on[i - 1] != raw_on[i]) s.points.push_back(raw[i]);
  const double end = tl.duration();
  if (extruding) s.events.push_back({end, Channel::extruder, false});
  if (uv) s.events.push_back({end, Channel::uv, false});
  return s;
}

StepSchedule schedule(const toolpath::Toolpath& t, const FlowModel& f, const DriveTrain& d,
                      const toolpath::MotionSettings& m) {
  return schedule(toolpath::Timeline(t, m), f, d);
}

Feasibility drive_feasibility(double viscosity, const Nozzle& n, const DriveTrain& d, const FlowModel& f) {
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (!(n.diameter > 0.0) || !(n.land_length > 0.0)) throw std::invalid_argument("nozzle dimensions must be positive");
  d.validate();
  // SI units throughout.
  const double r = 0.5 * n.diameter * 1e-3;
  const double len = n.land_length * 1e-3;
  const double q = f.rate * 1e-9;
  Feasibility out;
  out.pressure = 8.0 * viscosity * len * q / (geom::kPi * std::pow(r, 4));
  out.force = out.pressure * d.bore_area() * 1e-6;
  out.torque = out.force * d.lead * 1e-3 / (2.0 * geom::kPi * d.efficiency);
  out.margin = out.torque > 0.0 ? d.rated_torque / out.torque : std::numeric_limits<double>::infinity();
  if (out.margin < 1.0)
    throw InfeasibleError(out.torque, fmt::format("required torque {:.3f} N m exceeds rated {:.3f} N m", out.torque,
                                                  d.rated_torque));
  return out;
}

const char* channel_name(Channel c) { return c == Channel::extruder ? "extruder" : "uv"; }

std::string steps_csv(const StepSchedule& s) {
  std::string out = "time_s,cumulative_steps\n";
  for (const auto& p : s.points) out += fmt::format("{},{}\n", fixed6(p.time), fixed6(p.steps));
  return out;
}

std::string events_csv(const StepSchedule& s) {
  std::string out = "time_s,channel,state\n";
  for (const auto& e : s.events) out += fmt::format("{},{},{}\n", fixed6(e.time), channel_name(e.channel), e.on ? "on" : "off");
  return out;
}

}  // namespace ramcell::extrusion
