#pragma once

#include "ramcell/cure_sim.hpp"
#include "ramcell/shapes.hpp"
#include "ramcell/toolpath.hpp"

namespace ramcell::fixtures {

inline toolpath::Toolpath line(geom::Vec3 a, geom::Vec3 b, double speed, bool extruding = true) {
  toolpath::Segment s;
  s.start = a;
  s.end = b;
  s.speed = speed;
  s.extruding = extruding;
  s.uv_on = extruding;
  s.layer = toolpath::layer_of(b.z, 0.85);
  toolpath::Toolpath t;
  t.append(s);
  return t;
}

/// Extend, orient and resample a nominal path the way the CLI does.
inline toolpath::Toolpath prepare(const toolpath::Toolpath& nominal, double lead = 25.0, double res = 1.0) {
  auto t = toolpath::add_cure_extensions(nominal, {lead, 30.0 * geom::kPi / 180.0});
  t = toolpath::assign_orientations(t, cure::UVSpot{}.uv_offset());
  return toolpath::resample(t, res);
}

inline toolpath::Toolpath specimen(const char* id, double lead = 25.0) {
  const auto shape = *shapes::builtin(id);
  const double speed = shapes::is_3d(shape) ? 4.0 : 3.0;
  return prepare(shapes::generate(shape, {}, speed, {400.0, 0.0, 0.0}), lead);
}

inline cure::MaterialFormulation material(const char* name) {
  return *cure::find_material(cure::material_library(), name);
}

}  // namespace ramcell::fixtures
