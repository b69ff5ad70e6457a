#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ramcell/cell.hpp"
#include "ramcell/cure_sim.hpp"
#include "ramcell/extrusion.hpp"
#include "ramcell/shapes.hpp"
#include "ramcell/toolpath.hpp"

namespace ramcell::config {

/// Everything one CLI invocation needs. Sections of the INI file map onto the
/// groups below; see config/ramcell.ini for the annotated defaults.
struct JobConfig {
  // [job]
  std::string shape = "wall-50x10";  ///< built-in id, used when gcode is empty
  std::string gcode;                 ///< path to a g-code file
  std::string material = "dlp-fs9";
  double speed_2d = 3.0;  ///< mm/s
  double speed_3d = 4.0;  ///< mm/s
  shapes::LayerSettings layers;
  double resolution = 1.0;  ///< mm, simulation and planning step
  std::string output = "out";

  toolpath::ExtensionPolicy extension;  // [extension]
  toolpath::MotionSettings motion;      // [motion]

  // [flow]
  extrusion::FlowModel flow;
  extrusion::Nozzle nozzle;
  double viscosity = 10.0;  ///< Pa s, for the drive-torque check

  extrusion::DriveTrain drive;  // [drive]

  // [uv]
  cure::UVSpot spot;
  bool uv_enabled = true;

  // [cure]
  cure::DoseSettings dose;
  cure::SpreadModel spread = cure::calibrated_spread();
  double alpha_min = 0.3;  ///< elements below this cure degree fail the job

  cell::KinematicsConfig kinematics;  // [robot]
  cell::CellEnvironment environment;  // [cell], [obstacle.NAME]
  std::vector<cure::MaterialFormulation> materials = cure::material_library();  // [material.NAME]
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Overlays INI text on `base`. Unknown sections or keys are errors.
JobConfig load(const std::string& ini, JobConfig base = {});
/// Applies one `section.key=value` override.
void set(JobConfig& c, const std::string& assignment);
/// Full effective configuration; load(dump(c)) reproduces c.
std::string dump(const JobConfig& c);
/// Throws ConfigError for inconsistent values (unknown material, bad speeds...).
void validate(const JobConfig& c);

const cure::MaterialFormulation& material(const JobConfig& c);

}  // namespace ramcell::config
