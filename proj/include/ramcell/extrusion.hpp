#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ramcell/toolpath.hpp"

namespace ramcell::extrusion {

struct FlowModel {
  double rate = 5.3;  ///< mm^3/s, constant regardless of travel speed
};

struct Nozzle {
  double diameter = 1.5;      ///< mm
  double land_length = 10.0;  ///< mm, capillary length for the pressure model

  double area() const;
};

/// Syringe barrel driven by a stepper through a lead screw.
struct DriveTrain {
  double bore_diameter = 40.0;    ///< mm
  double capacity_ml = 200.0;
  double plunger_travel = 160.0;  ///< mm
  double lead = 8.0;              ///< mm/rev
  int full_steps = 200;           ///< per rev
  int microsteps = 8;
  double efficiency = 0.5;        ///< screw efficiency, (0, 1]
  double rated_torque = 1.9;      ///< N m
  double max_step_rate = 25000.0; ///< steps/s the driver accepts

  double bore_area() const;       ///< mm^2
  double steps_per_mm() const;    ///< plunger travel
  double volume_per_step() const; ///< mm^3
  /// Throws std::invalid_argument for non-positive values or a capacity that
  /// disagrees with plunger travel x bore area by more than 5%.
  void validate() const;
};

enum class Channel { extruder, uv };

struct IOEvent {
  double time = 0.0;  ///< s
  Channel channel = Channel::extruder;
  bool on = false;

  bool operator==(const IOEvent&) const = default;
};

struct StepPoint {
  double time = 0.0;   ///< s
  double steps = 0.0;  ///< cumulative; fractional, rounding happens in the driver

  bool operator==(const StepPoint&) const = default;
};

/// Piecewise-linear cumulative step count plus digital I/O events.
struct StepSchedule {
  std::vector<StepPoint> points;
  std::vector<IOEvent> events;

  double total_steps() const { return points.empty() ? 0.0 : points.back().steps; }
  double steps_at(double t) const;
};

class MotorLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(double torque, const std::string& what) : std::runtime_error(what), torque_(torque) {}
  double torque() const { return torque_; }

 private:
  double torque_;
};

/// Bead cross-section from flow conservation, A = Q / v.
double bead_area(double flow, double speed);
/// Stepper rate that pushes `flow` through the syringe.
double step_rate(double flow, const DriveTrain& d);

/// Steps run at a constant rate during extruding moves and stop otherwise.
/// Extruder and UV events fall on phase boundaries; anything still on at the
/// end is switched off at the final time. Throws MotorLimitError when the
/// rate exceeds the driver limit.
StepSchedule schedule(const toolpath::Timeline& tl, const FlowModel& f, const DriveTrain& d);
StepSchedule schedule(const toolpath::Toolpath& t, const FlowModel& f, const DriveTrain& d,
                      const toolpath::MotionSettings& m = {});

struct Feasibility {
  double pressure = 0.0;  ///< Pa
  double force = 0.0;     ///< N on the plunger
  double torque = 0.0;    ///< N m at the motor
  double margin = 0.0;    ///< rated / required, infinite for zero load
};

/// Newtonian capillary flow through the nozzle land. Throws
/// std::invalid_argument for viscosity <= 0 and InfeasibleError when the
/// motor cannot supply the torque.
Feasibility drive_feasibility(double viscosity, const Nozzle& n, const DriveTrain& d, const FlowModel& f);

/// `time_s,cumulative_steps` lines with a header.
std::string steps_csv(const StepSchedule& s);
/// `time_s,channel,state` lines with a header.
std::string events_csv(const StepSchedule& s);

const char* channel_name(Channel c);

}  // namespace ramcell::extrusion
