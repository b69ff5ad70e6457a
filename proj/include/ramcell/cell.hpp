#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramcell/cure_sim.hpp"
#include "ramcell/extrusion.hpp"
#include "ramcell/kinematics.hpp"
#include "ramcell/toolpath.hpp"

namespace ramcell::cell {

using geom::Pose;
using geom::Vec3;
using kinematics::JointConfig;

struct Box {
  std::string name;
  Vec3 lo;
  Vec3 hi;
};

/// End-effector body above the nozzle: a capsule along tool -z starting
/// `offset` mm above the tip. The nozzle between tip and capsule is a line.
struct Capsule {
  double radius = 60.0;   ///< mm
  double length = 250.0;  ///< mm, axis length
  double offset = 80.0;   ///< mm
};

struct CellEnvironment {
  double table_z = 0.0;
  std::vector<Box> obstacles;
  Pose base;  ///< robot base in the world
  Capsule effector;
  Vec3 print_origin{400.0, 0.0, 0.0};
  double sample_dt = 0.01;  ///< s, collision sampling step

  /// Throws std::invalid_argument for degenerate boxes or capsule sizes.
  void validate() const;
};

struct KinematicsConfig {
  kinematics::DHParams dh = kinematics::DHParams::ur5e();
  kinematics::JointLimits limits = kinematics::JointLimits::ur_default();
  Pose tcp{{0.0, 0.0, 200.0}, {}};
  JointConfig home{geom::kPi, -geom::kPi / 2, geom::kPi / 2, -geom::kPi / 2, -geom::kPi / 2, 0.0};
  double max_joint_speed = geom::kPi;  ///< rad/s
  double max_jump = 0.5;               ///< rad between consecutive waypoints
  double rotation_step = 0.05;         ///< rad between waypoints of an in-place turn
  double singular_eps = 1e6;           ///< mm^3, manipulability threshold
};

struct Waypoint {
  double time = 0.0;
  JointConfig q{};
  Vec3 tcp;            ///< commanded TCP position (world)
  double speed = 0.0;  ///< mm/s of the move ending here, 0 for turns and the start
  bool free_parameter = false;
};

struct RobotProgram {
  std::vector<Waypoint> waypoints;
  std::vector<extrusion::IOEvent> events;
  std::map<std::string, std::string> meta;
  /// Failures found by checks; a program with any is never emitted.
  std::vector<std::string> failures;

  bool empty() const { return waypoints.empty(); }
  double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().time; }
};

class PlanningError : public std::runtime_error {
 public:
  PlanningError(std::string kind, double time, Vec3 position, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), time_(time), position_(position) {}
  const std::string& kind() const { return kind_; }  ///< unreachable | configuration-jump | joint-speed
  double time() const { return time_; }
  const Vec3& position() const { return position_; }

 private:
  std::string kind_;
  double time_;
  Vec3 position_;
};

/// One waypoint per resampled segment end plus intermediate waypoints for
/// in-place turns. Branches follow select_branch from the home config.
/// Throws PlanningError.
RobotProgram plan_trajectory(const toolpath::Timeline& tl, const KinematicsConfig& k, const CellEnvironment& env,
                             const std::vector<extrusion::IOEvent>& events = {});

/// Joint-space interpolation between waypoints.
JointConfig config_at(const RobotProgram& p, double t);

struct Finding {
  std::string kind;  ///< collision: obstacle name; planning: error kind
  double time = 0.0;
  Vec3 position;     ///< TCP
  std::string detail;
};

/// Earliest contact per obstacle ("table", "print", box names). Printed beads
/// count once their deposit time has passed.
std::vector<Finding> check_collisions(const RobotProgram& p, const KinematicsConfig& k, const CellEnvironment& env,
                                      const cure::DepositionMap* printed = nullptr);

struct SingularityInterval {
  double enter = 0.0;
  double exit = 0.0;
};

/// Contiguous waypoint runs with manipulability below eps.
std::vector<SingularityInterval> detect_singularity_traversal(const RobotProgram& p, const KinematicsConfig& k,
                                                              double eps);

class EmitRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Robot script. Events at or before a waypoint's time follow that move;
/// events after the last waypoint are preceded by a sleep. Throws EmitRefused
/// if the program carries failures.
std::string emit_program(const RobotProgram& p);

struct SimReport {
  std::string specimen;
  std::string material;
  std::vector<Finding> reach_failures;
  std::vector<Finding> collisions;
  std::vector<SingularityInterval> singularities;
  std::optional<cure::DoseSummary> dose;
  std::size_t undercured = 0;
  double alpha_min = 0.0;
  std::optional<cure::Dimensions> dimensions;
  double spread_coefficient = 0.0;

  bool printable() const { return reach_failures.empty() && collisions.empty() && undercured == 0; }
  std::vector<std::string> failures() const;
};

class ReportParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented key=value text.
std::string to_text(const SimReport& r);
/// Inverse of to_text. Empty text yields a report without a specimen.
SimReport parse_report(const std::string& text);

}  // namespace ramcell::cell
