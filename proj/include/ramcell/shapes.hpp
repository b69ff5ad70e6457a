#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ramcell/toolpath.hpp"

namespace ramcell::shapes {

/// Built-in specimens. Rectangle and square are closed loops; the wall is an
/// open line printed back and forth.
enum class ShapeKind { rectangle, wall, square };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::rectangle;
  double length = 90.0;  ///< mm along x
  double width = 60.0;   ///< mm along y (unused for the wall)
  double height = 0.0;   ///< mm, 0 for single-layer specimens
};

/// rectangle-90x60 | wall-50x10 | square-30x30x8.5
std::optional<ShapeSpec> builtin(std::string_view id);
std::string id(const ShapeSpec& s);
bool is_3d(const ShapeSpec& s);

struct LayerSettings {
  double layer_height = 0.85;       ///< mm
  double first_layer_height = 1.0;  ///< mm, nozzle height of the first layer
};

int layer_count(const ShapeSpec& s, const LayerSettings& l);

/// Generates the nominal path centered on `center` (table at z = 0).
toolpath::Toolpath generate(const ShapeSpec& s, const LayerSettings& l, double speed, const geom::Vec3& center);

}  // namespace ramcell::shapes
