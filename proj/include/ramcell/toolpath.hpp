#pragma once

#include <cstddef>
#include <vector>

#include "ramcell/geometry.hpp"

namespace ramcell::toolpath {

using geom::Rotation;
using geom::Vec3;

/// Tool orientation with the nozzle axis (tool +z) pointing along world -z.
Rotation tool_down();
/// Heading of the tool x axis about world z, in (-pi, pi].
double tool_yaw(const Rotation& r);
/// True when the tool +z axis points along world -z within 1e-9.
bool is_tool_down(const Rotation& r);

/// Layer index of a nozzle height: floor(z / layer_height).
int layer_of(double z, double layer_height);

/// One straight nozzle move.
struct Segment {
  Vec3 start;
  Vec3 end;
  double speed = 1.0;  ///< mm/s, > 0
  bool extruding = false;
  bool uv_on = false;
  Rotation orientation = tool_down();
  int layer = 0;

  double length() const { return geom::distance(start, end); }
  Vec3 direction() const { return geom::normalized(end - start); }
  bool operator==(const Segment&) const = default;
};

/// Ordered nozzle moves. Degenerate (zero-length) segments are dropped on append.
class Toolpath {
 public:
  Toolpath() = default;
  explicit Toolpath(std::vector<Segment> segments);

  /// Appends a segment. Throws std::invalid_argument for non-positive speed or
  /// a decreasing layer index; silently drops segments shorter than 1e-9 mm.
  void append(const Segment& s);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  const Segment& operator[](std::size_t i) const { return segments_[i]; }
  auto begin() const { return segments_.begin(); }
  auto end() const { return segments_.end(); }

  bool operator==(const Toolpath&) const = default;

 private:
  std::vector<Segment> segments_;
};

/// Non-extruding UV-on overruns that let the trailing spot reach path ends and corners.
struct ExtensionPolicy {
  double lead_length = 25.0;               ///< mm
  double corner_angle = 30.0 * geom::kPi / 180.0;  ///< rad, turns sharper than this get an overrun
};

/// Appends end overruns and inserts overrun-and-return legs at sharp corners.
/// Extruding segments are passed through untouched.
Toolpath add_cure_extensions(const Toolpath& t, const ExtensionPolicy& p);

/// Where the UV spot sits relative to the nozzle, in the tool frame.
struct UvOffset {
  Vec3 tool_offset{-14.0, 0.0, 0.0};
};

/// Yaws each segment about world z so the UV spot trails the nozzle.
/// Purely vertical moves keep the previous yaw. Throws std::invalid_argument
/// for a zero-length segment.
Toolpath assign_orientations(const Toolpath& t, const UvOffset& uv);

/// Splits every segment into equal pieces no longer than max_len.
Toolpath resample(const Toolpath& t, double max_len);

struct PathStats {
  double total_length = 0.0;
  double extruded_length = 0.0;
  double extrusion_time = 0.0;
  int layer_count = 0;
};

PathStats path_stats(const Toolpath& t);

// ---------------------------------------------------------------------------
// Motion timing shared by extrusion scheduling, dose simulation and planning.

struct MotionSettings {
  double reorient_rate = 1.0;  ///< rad/s of tool rotation between differently oriented segments
};

/// A timed stretch of the program: either a segment traversal or an in-place
/// tool rotation between two segments.
struct Phase {
  enum class Kind { move, reorient };
  Kind kind = Kind::move;
  std::size_t segment = 0;  ///< move: the segment; reorient: the segment before the turn
  double t0 = 0.0;
  double t1 = 0.0;
  bool yaw_mode = false;  ///< reorient about world z (tool stays pointing down)
  double yaw0 = 0.0;
  double yaw1 = 0.0;
  Rotation from;
  Rotation to;
  bool extruding = false;
  bool uv_on = false;
};

struct ToolState {
  Vec3 position;
  Rotation orientation;
  bool extruding = false;
  bool uv_on = false;
  std::size_t phase = 0;
};

/// Time parameterization of a continuous toolpath. Rotations between segments
/// run at a fixed angular rate with the extruder off; yaw rotations are kept
/// inside [-pi, pi] so the wrist never winds up.
class Timeline {
 public:
  Timeline(const Toolpath& t, const MotionSettings& m);

  const Toolpath& path() const { return path_; }
  const std::vector<Phase>& phases() const { return phases_; }
  double duration() const { return phases_.empty() ? 0.0 : phases_.back().t1; }
  ToolState at(double t) const;
  /// Time at which the nozzle is a fraction s in [0,1] along segment i.
  double segment_time(std::size_t i, double s) const;
  /// Phase index of the move over segment i.
  std::size_t move_phase(std::size_t i) const { return move_phase_[i]; }

 private:
  Toolpath path_;
  std::vector<Phase> phases_;
  std::vector<std::size_t> move_phase_;
};

}  // namespace ramcell::toolpath
