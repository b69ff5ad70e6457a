#include "ramcell/shapes.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace ramcell::shapes {

using geom::Vec3;
using toolpath::Segment;

std::optional<ShapeSpec> builtin(std::string_view name) {
  if (name == "rectangle-90x60") return ShapeSpec{ShapeKind::rectangle, 90.0, 60.0, 0.0};
  if (name == "wall-50x10") return ShapeSpec{ShapeKind::wall, 50.0, 0.0, 10.0};
  if (name == "square-30x30x8.5") return ShapeSpec{ShapeKind::square, 30.0, 30.0, 8.5};
  return std::nullopt;
}

std::string id(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::rectangle:
      return fmt::format("rectangle-{}x{}", s.length, s.width);
    case ShapeKind::wall:
      return fmt::format("wall-{}x{}", s.length, s.height);
    case ShapeKind::square:
      return fmt::format("square-{}x{}x{}", s.length, s.width, s.height);
  }
  return "unknown";
}

bool is_3d(const ShapeSpec& s) { return s.kind != ShapeKind::rectangle; }

int layer_count(const ShapeSpec& s, const LayerSettings& l) {
  if (!is_3d(s)) return 1;
  return std::max(1, static_cast<int>(std::lround(s.height / l.layer_height)));
}

toolpath::Toolpath generate(const ShapeSpec& s, const LayerSettings& l, double speed, const Vec3& center) {
  if (s.length <= 0.0 || (s.kind != ShapeKind::wall && s.width <= 0.0) || (is_3d(s) && s.height <= 0.0))
    throw std::invalid_argument("shape dimensions must be positive");
  if (l.layer_height <= 0.0 || l.first_layer_height <= 0.0)
    throw std::invalid_argument("layer heights must be positive");

  toolpath::Toolpath out;
  const int layers = layer_count(s, l);
  auto z_of = [&](int i) { return l.first_layer_height + i * l.layer_height; };
  auto add = [&](const Vec3& a, const Vec3& b, bool extrude) {
    Segment seg;
    seg.start = a + center;
    seg.end = b + center;
    seg.speed = speed;
    seg.extruding = extrude;
    seg.uv_on = extrude;
    seg.layer = toolpath::layer_of(seg.end.z, l.layer_height);
    out.append(seg);
  };

  if (s.kind == ShapeKind::wall) {
    const double hx = 0.5 * s.length;
    for (int i = 0; i < layers; ++i) {
      const double z = z_of(i);
      const double from = i % 2 == 0 ? -hx : hx;
      if (i > 0) add({from, 0, z_of(i - 1)}, {from, 0, z}, false);
      add({from, 0, z}, {-from, 0, z}, true);
    }
    return out;
  }

  const double hx = 0.5 * s.length, hy = 0.5 * s.width;
  for (int i = 0; i < layers; ++i) {
    const double z = z_of(i);
    if (i > 0) add({-hx, -hy, z_of(i - 1)}, {-hx, -hy, z}, false);
    add({-hx, -hy, z}, {hx, -hy, z}, true);
    add({hx, -hy, z}, {hx, hy, z}, true);
    add({hx, hy, z}, {-hx, hy, z}, true);
    add({-hx, hy, z}, {-hx, -hy, z}, true);
  }
  return out;
}

}  // namespace ramcell::shapes
