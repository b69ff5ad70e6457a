#include "ramcell/pipeline.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ramcell/gcode.hpp"
#include "ramcell/shapes.hpp"
#include "ramcell/text.hpp"

namespace ramcell::pipeline {

namespace {

toolpath::Toolpath translated(const toolpath::Toolpath& t, const geom::Vec3& by) {
  std::vector<toolpath::Segment> out(t.begin(), t.end());
  for (auto& s : out) {
    s.start = s.start + by;
    s.end = s.end + by;
  }
  return toolpath::Toolpath(std::move(out));
}

// The approach move from the g-code origin to the first point is a plain
// travel; the planner reaches the path start from home on its own.
toolpath::Toolpath without_approach(const toolpath::Toolpath& t) {
  auto first = t.begin();
  while (first != t.end() && !first->extruding && !first->uv_on) ++first;
  return toolpath::Toolpath(std::vector<toolpath::Segment>(first, t.end()));
}

bool has_marker(const gcode::Program& p) {
  for (const auto& c : p.commands)
    if (c.kind == gcode::CommandKind::comment && c.text.find(kExtendedMarker) != std::string::npos) return true;
  return false;
}

toolpath::Toolpath without_uv(const toolpath::Toolpath& t) {
  std::vector<toolpath::Segment> out(t.begin(), t.end());
  for (auto& s : out) s.uv_on = false;
  return toolpath::Toolpath(std::move(out));
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InputError("cannot write " + path);
}

PreparedPath prepare(const config::JobConfig& c) {
  PreparedPath p;
  bool extended = false;
  toolpath::Toolpath nominal;
  if (!c.gcode.empty()) {
    p.name = std::filesystem::path(c.gcode).stem().string();
    const auto program = gcode::parse(read_file(c.gcode));
    std::string errors;
    for (const auto& d : program.diagnostics)
      if (d.severity == gcode::Severity::error) errors += c.gcode + ":" + gcode::format(d) + "\n";
    if (!errors.empty()) throw InputError(errors.substr(0, errors.size() - 1));
    try {
      nominal = without_approach(gcode::to_toolpath(program, {c.speed_2d, c.layers.layer_height}, {}));
    } catch (const gcode::ConversionError& e) {
      throw InputError(fmt::format("{}:{}: {}", c.gcode, e.line(), e.what()));
    }
    extended = has_marker(program);
  } else {
    const auto shape = shapes::builtin(c.shape);
    if (!shape) throw config::ConfigError("unknown shape '" + c.shape + "'");
    p.name = c.shape;
    nominal = shapes::generate(*shape, c.layers, shapes::is_3d(*shape) ? c.speed_3d : c.speed_2d, {});
  }
  if (nominal.empty()) throw InputError("toolpath is empty");

  p.extended = extended ? nominal : toolpath::add_cure_extensions(nominal, c.extension);
  auto world = translated(p.extended, c.environment.print_origin);
  world = toolpath::assign_orientations(world, c.spot.uv_offset());
  p.path = toolpath::resample(world, c.resolution);
  if (!c.uv_enabled) p.path = without_uv(p.path);
  return p;
}

Outcome run(const config::JobConfig& c, const PreparedPath& p) {
  Outcome o;
  o.input = p;
  const auto& mat = config::material(c);
  const toolpath::Timeline tl(p.path, c.motion);

  try {
    c.drive.validate();
    extrusion::drive_feasibility(c.viscosity, c.nozzle, c.drive, c.flow);
    o.steps = extrusion::schedule(tl, c.flow, c.drive);
  } catch (const extrusion::InfeasibleError& e) {
    throw JobFailed(e.what());
  } catch (const extrusion::MotorLimitError& e) {
    throw JobFailed(e.what());
  }

  auto& r = o.report;
  r.specimen = p.name;
  r.material = mat.name;
  r.alpha_min = c.alpha_min;
  r.spread_coefficient = c.spread.coefficient;

  cure::SimulationInputs in;
  in.flow = c.flow;
  in.nozzle = c.nozzle;
  in.spot = c.spot;
  in.material = mat;
  in.spread = c.spread;
  in.dose = c.dose;
  in.resolution = c.resolution;
  o.deposit = cure::simulate(tl, in);

  try {
    o.program = cell::plan_trajectory(tl, c.kinematics, c.environment, o.steps.events);
  } catch (const cell::PlanningError& e) {
    r.reach_failures.push_back({e.kind(), e.time(), e.position(), e.what()});
  }
  if (!o.program.empty()) {
    r.collisions = cell::check_collisions(o.program, c.kinematics, c.environment, &o.deposit);
    r.singularities = cell::detect_singularity_traversal(o.program, c.kinematics, c.kinematics.singular_eps);
  }

  if (!o.deposit.elements.empty()) {
    r.dose = cure::dose_summary(o.deposit, c.spot.footprint_radius());
    r.dimensions = cure::predict_dimensions(o.deposit, c.environment.table_z);
  }
  r.undercured = cure::flag_undercured(o.deposit, c.alpha_min).size();

  o.program.meta["specimen"] = p.name;
  o.program.meta["material"] = mat.name;
  o.program.meta["duration_s"] = fixed6(tl.duration());
  o.program.failures = r.failures();
  return o;
}

std::string path_csv(const toolpath::Toolpath& t) {
  std::string out = "segment,x0,y0,z0,x1,y1,z1,speed,extruding,uv,yaw_deg,layer\n";
  std::size_t i = 0;
  for (const auto& s : t) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", i++, fixed6(s.start.x), fixed6(s.start.y),
                       fixed6(s.start.z), fixed6(s.end.x), fixed6(s.end.y), fixed6(s.end.z), fixed6(s.speed),
                       s.extruding ? 1 : 0, s.uv_on ? 1 : 0, fixed6(toolpath::tool_yaw(s.orientation) * 180.0 / geom::kPi),
                       s.layer);
  }
  return out;
}

}  // namespace ramcell::pipeline
