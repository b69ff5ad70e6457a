#include "ramcell/gcode.hpp"
#include "ramcell/text.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>

namespace ramcell::gcode {

namespace {

struct Word {
  char letter;
  double value;
  std::string_view raw;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string num(double v) { return fixed6(v); }

class LineParser {
 public:
  LineParser(std::string_view line, int number, Program& out) : line_(line), number_(number), out_(out) {}

  void run() {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < line_.size()) {
      const char c = line_[i];
      if (is_space(c)) {
        ++i;
      } else if (c == ';') {
        comment(line_.substr(i + 1));
        break;
      } else if (c == '(') {
        const auto close = line_.find(')', i);
        if (close == std::string_view::npos) {
          error("unterminated comment");
          return;
        }
        comment(line_.substr(i + 1, close - i - 1));
        i = close + 1;
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        std::size_t j = i + 1;
        while (j < line_.size() && is_space(line_[j])) ++j;
        std::size_t k = j;
        while (k < line_.size() && (std::isdigit(static_cast<unsigned char>(line_[k])) || line_[k] == '.' ||
                                    line_[k] == '-' || line_[k] == '+'))
          ++k;
        const std::string_view raw = line_.substr(j, k - j);
        double value = 0.0;
        const char* first = raw.data();
        if (!raw.empty() && raw.front() == '+') ++first;
        const auto res = std::from_chars(first, raw.data() + raw.size(), value);
        if (raw.empty() || res.ec != std::errc{} || res.ptr != raw.data() + raw.size() || !std::isfinite(value)) {
          error(fmt::format("malformed number for word {}", letter));
          return;
        }
        words.push_back({letter, value, raw});
        i = k;
      } else if (c == '*') {
        break;  // checksum
      } else {
        error(fmt::format("unexpected character '{}'", c));
        return;
      }
    }
    if (!words.empty()) command(words);
  }

 private:
  void comment(std::string_view body) {
    Command c;
    c.kind = CommandKind::comment;
    while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
    while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
    c.text = std::string(body);
    c.line = number_;
    out_.commands.push_back(std::move(c));
  }

  void error(std::string msg) { out_.diagnostics.push_back({number_, Severity::error, std::move(msg)}); }
  void warning(std::string msg) { out_.diagnostics.push_back({number_, Severity::warning, std::move(msg)}); }

  static bool integral(double v) { return v == std::floor(v) && v >= 0 && v < 1e6; }

  void command(std::vector<Word>& words) {
    std::size_t head = 0;
    if (words[0].letter == 'N') head = 1;  // line number
    if (head >= words.size()) return;
    const Word cmd = words[head];
    if ((cmd.letter != 'G' && cmd.letter != 'M') || !integral(cmd.value)) {
      error(fmt::format("unknown command '{}{}'", cmd.letter, cmd.raw));
      return;
    }
    const int code = static_cast<int>(cmd.value);
    std::vector<Word> args(words.begin() + static_cast<long>(head) + 1, words.end());

    if (cmd.letter == 'G') {
      switch (code) {
        case 0:
        case 1:
          move(code == 0 ? CommandKind::rapid_move : CommandKind::linear_move, args);
          return;
        case 2:
        case 3:
          error(fmt::format("arc G{} unsupported; tessellate curves into G1 moves", code));
          return;
        case 91:
          error("relative positioning (G91) unsupported");
          return;
        case 20:
          error("inch units (G20) unsupported");
          return;
        case 90:
        case 21:
          return;
        default:
          warning(fmt::format("G{} ignored", code));
          return;
      }
    }
    switch (code) {
      case 106:
        simple(CommandKind::tool_on, args);
        return;
      case 107:
        simple(CommandKind::tool_off, args);
        return;
      case 42:
        digital_out(args);
        return;
      default:
        warning(fmt::format("M{} ignored", code));
        return;
    }
  }

  void simple(CommandKind kind, const std::vector<Word>& args) {
    for (const auto& w : args) warning(fmt::format("word {} ignored", w.letter));
    Command c;
    c.kind = kind;
    c.line = number_;
    out_.commands.push_back(std::move(c));
  }

  void digital_out(const std::vector<Word>& args) {
    std::optional<double> pin, state;
    for (const auto& w : args) {
      if (w.letter == 'P' && !pin) {
        pin = w.value;
      } else if (w.letter == 'S' && !state) {
        state = w.value;
      } else {
        warning(fmt::format("word {} ignored", w.letter));
      }
    }
    if (!pin || !state) {
      error("M42 needs P and S words");
      return;
    }
    if (*pin != kUvPin) {
      warning(fmt::format("M42 on pin {} ignored", num(*pin)));
      return;
    }
    if (*state != 0.0 && *state != 1.0) {
      error("M42 S must be 0 or 1");
      return;
    }
    Command c;
    c.kind = *state == 1.0 ? CommandKind::uv_on : CommandKind::uv_off;
    c.line = number_;
    out_.commands.push_back(std::move(c));
  }

  void move(CommandKind kind, const std::vector<Word>& args) {
    Command c;
    c.kind = kind;
    c.line = number_;
    bool ok = true;
    auto set = [&](std::optional<double>& slot, const Word& w) {
      if (slot) {
        error(fmt::format("duplicate axis word {}", w.letter));
        ok = false;
      }
      slot = w.value;
    };
    for (const auto& w : args) {
      switch (w.letter) {
        case 'X':
          set(c.x, w);
          break;
        case 'Y':
          set(c.y, w);
          break;
        case 'Z':
          set(c.z, w);
          break;
        case 'F':
          set(c.feed, w);
          break;
        default:
          warning(fmt::format("word {} ignored", w.letter));
      }
    }
    if (!ok) return;
    if (c.feed && !(*c.feed > 0.0)) {
      error("feed must be positive");
      return;
    }
    if (!c.x && !c.y && !c.z && !c.feed) {
      error("move without axis or feed words");
      return;
    }
    out_.commands.push_back(std::move(c));
  }

  std::string_view line_;
  int number_;
  Program& out_;
};

}  // namespace

std::string format(const Diagnostic& d) {
  return fmt::format("{}:{}:{}", d.line, d.severity == Severity::error ? "error" : "warning", d.message);
}

bool Program::has_errors() const {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::error) return true;
  return false;
}

Program parse(std::string_view text) {
  Program p;
  int number = 0;
  while (!text.empty()) {
    ++number;
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    LineParser(line, number, p).run();
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return p;
}

toolpath::Toolpath to_toolpath(const Program& p, const ToolpathDefaults& defaults, const geom::Vec3& start) {
  for (const auto& d : p.diagnostics)
    if (d.severity == Severity::error) throw ConversionError(d.line, "program has errors: " + format(d));
  if (!(defaults.layer_height > 0.0)) throw ConversionError(0, "layer height must be positive");

  toolpath::Toolpath out;
  geom::Vec3 pos = start;
  std::optional<double> speed = defaults.speed;
  bool extruding = false;
  bool uv = false;
  for (const auto& c : p.commands) {
    switch (c.kind) {
      case CommandKind::tool_on:
        extruding = true;
        break;
      case CommandKind::tool_off:
        extruding = false;
        break;
      case CommandKind::uv_on:
        uv = true;
        break;
      case CommandKind::uv_off:
        uv = false;
        break;
      case CommandKind::comment:
        break;
      case CommandKind::rapid_move:
      case CommandKind::linear_move: {
        if (c.feed) speed = *c.feed / 60.0;
        if (!speed) throw ConversionError(c.line, fmt::format("line {}: move before any feed rate", c.line));
        const geom::Vec3 target{c.x.value_or(pos.x), c.y.value_or(pos.y), c.z.value_or(pos.z)};
        toolpath::Segment s;
        s.start = pos;
        s.end = target;
        s.speed = *speed;
        s.extruding = c.kind == CommandKind::linear_move && extruding;
        s.uv_on = uv;
        s.layer = toolpath::layer_of(target.z, defaults.layer_height);
        try {
          out.append(s);
        } catch (const std::invalid_argument& e) {
          throw ConversionError(c.line, fmt::format("line {}: {}", c.line, e.what()));
        }
        pos = target;
        break;
      }
    }
  }
  return out;
}

std::string emit(const toolpath::Toolpath& t, const std::vector<std::string>& header) {
  std::string out;
  for (const auto& h : header) out += "; " + h + "\n";
  if (t.empty()) return out;
  out += "G21\nG90\n";
  const auto& first = t[0].start;
  out += fmt::format("G0 X{} Y{} Z{} F{}\n", num(first.x), num(first.y), num(first.z), num(t[0].speed * 60.0));
  bool extruding = false;
  bool uv = false;
  for (const auto& s : t) {
    if (s.uv_on != uv) {
      out += fmt::format("M42 P{} S{}\n", kUvPin, s.uv_on ? 1 : 0);
      uv = s.uv_on;
    }
    if (s.extruding != extruding) {
      out += s.extruding ? "M106\n" : "M107\n";
      extruding = s.extruding;
    }
    out += fmt::format("G1 X{} Y{} Z{} F{}\n", num(s.end.x), num(s.end.y), num(s.end.z), num(s.speed * 60.0));
  }
  if (extruding) out += "M107\n";
  if (uv) out += fmt::format("M42 P{} S0\n", kUvPin);
  return out;
}

}  // namespace ramcell::gcode
