#pragma once

#include <stdexcept>
#include <string>

#include "ramcell/cell.hpp"
#include "ramcell/config.hpp"
#include "ramcell/cure_sim.hpp"
#include "ramcell/extrusion.hpp"
#include "ramcell/toolpath.hpp"

namespace ramcell::pipeline {

/// Comment written into planned g-code so a re-read skips the extension pass.
inline constexpr const char* kExtendedMarker = "ramcell-extended";

/// Bad input (g-code errors, unreadable file). Maps to the usage exit code.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Job-level check that fails before a report exists (drive limits).
class JobFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PreparedPath {
  std::string name;
  toolpath::Toolpath extended;  ///< part frame, with overruns, before orientation
  toolpath::Toolpath path;      ///< world frame, oriented and resampled
};

/// Builds the toolpath from a built-in shape or a g-code file.
PreparedPath prepare(const config::JobConfig& c);

struct Outcome {
  PreparedPath input;
  extrusion::StepSchedule steps;
  cell::RobotProgram program;  ///< empty when planning failed
  cure::DepositionMap deposit;
  cell::SimReport report;
};

/// Plans, checks and simulates a prepared path.
Outcome run(const config::JobConfig& c, const PreparedPath& p);

/// `segment,x0,y0,z0,x1,y1,z1,speed,extruding,uv,yaw_deg,layer` rows.
std::string path_csv(const toolpath::Toolpath& t);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace ramcell::pipeline
