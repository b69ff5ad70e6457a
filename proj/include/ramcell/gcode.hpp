#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ramcell/toolpath.hpp"

namespace ramcell::gcode {

// Supported dialect:
//   G0 / G1 X Y Z F     rapid / linear move, F in mm/min (modal)
//   M106 / M107         extruder on / off
//   M42 P<uv_pin> S1|S0 UV light on / off
//   G90, G21            accepted (absolute mm is the only mode)
//   G2 / G3, G91, G20   rejected with an error
// Any other well-formed G/M command is skipped with a warning.

/// Digital output pin carrying the UV light in M42 commands.
inline constexpr int kUvPin = 1;

enum class CommandKind { rapid_move, linear_move, tool_on, tool_off, uv_on, uv_off, comment };

struct Command {
  CommandKind kind = CommandKind::comment;
  std::optional<double> x, y, z;
  std::optional<double> feed;  ///< mm/min
  std::string text;            ///< comment body
  int line = 0;
};

enum class Severity { error, warning };

struct Diagnostic {
  int line = 0;
  Severity severity = Severity::error;
  std::string message;
};

/// Formats as `line:severity:message`.
std::string format(const Diagnostic& d);

struct Program {
  std::vector<Command> commands;
  std::vector<Diagnostic> diagnostics;

  bool has_errors() const;
};

/// Never throws on malformed input; every problem becomes a diagnostic.
Program parse(std::string_view text);

struct ToolpathDefaults {
  std::optional<double> speed;  ///< mm/s used before the first F word
  double layer_height = 0.85;   ///< mm, for layer assignment
};

class ConversionError : public std::runtime_error {
 public:
  ConversionError(int line, const std::string& what) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Interprets a program with modal feed and modal extruder/UV state.
/// Throws ConversionError if the program has errors or a move has no feed.
toolpath::Toolpath to_toolpath(const Program& p, const ToolpathDefaults& defaults, const geom::Vec3& start);

/// Writes a toolpath back as g-code. `header` lines are emitted as `;` comments.
std::string emit(const toolpath::Toolpath& t, const std::vector<std::string>& header = {"ramcell toolpath"});

}  // namespace ramcell::gcode
