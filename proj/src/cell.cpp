#include "ramcell/cell.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "ramcell/text.hpp"

namespace ramcell::cell {

namespace {

constexpr double kTouchTol = 1e-6;

// Distance from a point to an axis-aligned box (0 inside).
double point_box_distance(const Vec3& p, const Box& b) {
  const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
  const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
  const double dz = std::max({b.lo.z - p.z, 0.0, p.z - b.hi.z});
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// The distance along a segment is convex, so golden-section search converges.
double segment_box_distance(const Vec3& a, const Vec3& b, const Box& box) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  auto f = [&](double s) { return point_box_distance(a + (b - a) * s, box); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 80 && hi - lo > 1e-12; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f(0.5 * (lo + hi))});
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double dd = geom::dot(d, d);
  const double s = dd > 0.0 ? std::clamp(geom::dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
  return geom::distance(p, a + d * s);
}

}  // namespace

void CellEnvironment::validate() const {
  for (const auto& b : obstacles)
    if (!(b.hi.x > b.lo.x && b.hi.y > b.lo.y && b.hi.z > b.lo.z))
      throw std::invalid_argument("obstacle '" + b.name + "' is degenerate");
  if (!(effector.radius > 0.0 && effector.length >= 0.0 && effector.offset >= 0.0))
    throw std::invalid_argument("end-effector capsule must have positive radius");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("collision sample step must be positive");
}

RobotProgram plan_trajectory(const toolpath::Timeline& tl, const KinematicsConfig& k, const CellEnvironment& env,
                             const std::vector<extrusion::IOEvent>& events) {
  env.validate();
  RobotProgram prog;
  const auto& path = tl.path();
  if (path.empty()) return prog;
  prog.events = events;
  const Pose world_to_base = env.base.inverse();

  JointConfig prev = k.home;
  bool first = true;
  auto add = [&](double t, const Vec3& pos, const geom::Rotation& rot, double speed) {
    const Pose target = geom::compose(world_to_base, Pose{pos, rot});
    const auto sols = kinematics::ik(target, k.dh, k.tcp);
    if (sols.empty())
      throw PlanningError("unreachable", t, pos,
                          fmt::format("unreachable waypoint at t={} ({}, {}, {})", fixed6(t), fixed6(pos.x),
                                      fixed6(pos.y), fixed6(pos.z)));
    kinematics::IKSolution pick;
    try {
      pick = kinematics::select_branch(sols, prev, k.limits);
    } catch (const kinematics::UnreachableError&) {
      throw PlanningError("unreachable", t, pos, fmt::format("no solution within joint limits at t={}", fixed6(t)));
    }
    if (!first) {
      const double jump = kinematics::max_joint_distance(pick.q, prev);
      if (jump > k.max_jump)
        throw PlanningError("configuration-jump", t, pos,
                            fmt::format("configuration jump of {} rad at t={}", fixed6(jump), fixed6(t)));
      const double dt = t - prog.waypoints.back().time;
      if (jump > k.max_joint_speed * dt + 1e-12)
        throw PlanningError("joint-speed", t, pos,
                            fmt::format("joint speed {} rad/s exceeds limit at t={}", fixed6(jump / dt), fixed6(t)));
    }
    prog.waypoints.push_back({t, pick.q, pos, speed, pick.free_parameter});
    prev = pick.q;
    first = false;
  };

  add(0.0, path[0].start, path[0].orientation, 0.0);
  for (const auto& ph : tl.phases()) {
    if (!(ph.t1 > ph.t0)) continue;
    if (ph.kind == toolpath::Phase::Kind::move) {
      const auto& s = path[ph.segment];
      add(ph.t1, s.end, s.orientation, s.speed);
      continue;
    }
    const double sweep = ph.yaw_mode ? std::abs(ph.yaw1 - ph.yaw0) : ph.from.angle_to(ph.to);
    const int n = std::max(1, static_cast<int>(std::ceil(sweep / k.rotation_step - 1e-9)));
    for (int i = 1; i <= n; ++i) {
      const double t = i == n ? ph.t1 : ph.t0 + (ph.t1 - ph.t0) * i / n;
      const auto st = tl.at(t);
      add(t, st.position, i == n ? ph.to : st.orientation, 0.0);
    }
  }
  return prog;
}

JointConfig config_at(const RobotProgram& p, double t) {
  const auto& w = p.waypoints;
  if (w.empty()) return {};
  if (t <= w.front().time) return w.front().q;
  if (t >= w.back().time) return w.back().q;
  auto it = std::upper_bound(w.begin(), w.end(), t, [](double v, const Waypoint& x) { return v < x.time; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double s = (t - a.time) / (b.time - a.time);
  JointConfig q;
  for (int i = 0; i < 6; ++i) q[i] = a.q[i] + (b.q[i] - a.q[i]) * s;
  return q;
}

std::vector<Finding> check_collisions(const RobotProgram& p, const KinematicsConfig& k, const CellEnvironment& env,
                                      const cure::DepositionMap* printed) {
  env.validate();
  std::vector<Finding> found;
  if (p.empty()) return found;
  std::map<std::string, bool> seen;
  auto report = [&](const std::string& what, double t, const Vec3& tip, std::string detail) {
    if (seen[what]) return;
    seen[what] = true;
    found.push_back({what, t, tip, std::move(detail)});
  };

  const auto steps = static_cast<std::size_t>(std::ceil(p.duration() / env.sample_dt - 1e-9));
  std::size_t deposited = 0;
  double max_top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = std::min(p.duration(), static_cast<double>(i) * env.sample_dt);
    const Pose tcp = geom::compose(env.base, kinematics::fk(config_at(p, t), k.dh, k.tcp));
    const Vec3 tip = tcp.position;
    const Vec3 up = tcp.orientation.rotate({0.0, 0.0, -1.0});
    const Vec3 c0 = tip + up * env.effector.offset;
    const Vec3 c1 = c0 + up * env.effector.length;

    if (tip.z < env.table_z - kTouchTol)
      report("table", t, tip, fmt::format("nozzle {} mm below table", fixed6(env.table_z - tip.z)));
    else if (std::min(c0.z, c1.z) - env.effector.radius < env.table_z - kTouchTol)
      report("table", t, tip, "end-effector body touches table");

    if (printed) {
      const auto& el = printed->elements;
      while (deposited < el.size() && el[deposited].deposit_time < t) {
        max_top = std::max(max_top, el[deposited].top);
        ++deposited;
      }
      const bool body_low = std::min(c0.z, c1.z) - env.effector.radius < max_top;
      for (std::size_t j = 0; j < deposited && (max_top > tip.z + kTouchTol || body_low); ++j) {
        const auto& e = el[j];
        if (e.top > tip.z + kTouchTol) {
          const Vec3 half = e.direction * (0.5 * e.length);
          const double lateral = point_segment_distance(geom::horizontal(tip), geom::horizontal(e.centroid - half),
                                                        geom::horizontal(e.centroid + half));
          if (lateral <= 0.5 * e.width) {
            report("print", t, tip, fmt::format("nozzle {} mm into printed bead", fixed6(e.top - tip.z)));
            break;
          }
        }
        if (body_low && point_segment_distance({e.centroid.x, e.centroid.y, e.top}, c0, c1) < env.effector.radius) {
          report("print", t, tip, "end-effector body touches printed part");
          break;
        }
      }
    }

    for (const auto& b : env.obstacles) {
      if (segment_box_distance(tip, c0, b) <= 0.0)
        report(b.name, t, tip, "nozzle intersects obstacle");
      else if (segment_box_distance(c0, c1, b) < env.effector.radius)
        report(b.name, t, tip, "end-effector body intersects obstacle");
    }
  }
  return found;
}

std::vector<SingularityInterval> detect_singularity_traversal(const RobotProgram& p, const KinematicsConfig& k,
                                                              double eps) {
  std::vector<SingularityInterval> out;
  bool inside = false;
  for (const auto& w : p.waypoints) {
    const bool singular = kinematics::is_singular(w.q, k.dh, eps);
    if (singular && !inside) out.push_back({w.time, w.time});
    if (singular) out.back().exit = w.time;
    if (!singular && inside) out.back().exit = w.time;
    inside = singular;
  }
  return out;
}

namespace {

std::string joints(const JointConfig& q) {
  return fmt::format("[{:.6f}, {:.6f}, {:.6f}, {:.6f}, {:.6f}, {:.6f}]", q[0], q[1], q[2], q[3], q[4], q[5]);
}

std::string io_line(const extrusion::IOEvent& e) {
  return fmt::format("  set_digital_out({}, {})\n", e.channel == extrusion::Channel::extruder ? 0 : 1,
                     e.on ? "True" : "False");
}

}  // namespace

std::string emit_program(const RobotProgram& p) {
  if (!p.failures.empty()) throw EmitRefused("program has failures: " + p.failures.front());
  std::string out = "# ramcell robot script v1\n";
  for (const auto& [key, value] : p.meta) out += fmt::format("# {}={}\n", key, value);
  out += "def ramcell_print():\n";

  auto events = p.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const extrusion::IOEvent& a, const extrusion::IOEvent& b) { return a.time < b.time; });
  std::size_t next = 0;
  double now = 0.0;
  for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
    const auto& w = p.waypoints[i];
    if (i == 0) {
      out += fmt::format("  movej({})\n", joints(w.q));
    } else {
      out += fmt::format("  movel({}, v={:.6f}, t={:.6f})\n", joints(w.q), w.speed / 1000.0,
                         w.time - p.waypoints[i - 1].time);
    }
    now = w.time;
    while (next < events.size() && events[next].time <= w.time + 1e-9) out += io_line(events[next++]);
  }
  for (; next < events.size(); ++next) {
    if (events[next].time > now) {
      out += fmt::format("  sleep({:.6f})\n", events[next].time - now);
      now = events[next].time;
    }
    out += io_line(events[next]);
  }
  out += "end\nramcell_print()\n";
  return out;
}

std::vector<std::string> SimReport::failures() const {
  std::vector<std::string> out;
  for (const auto& f : reach_failures) out.push_back(f.kind + ": " + f.detail);
  for (const auto& f : collisions) out.push_back("collision with " + f.kind + ": " + f.detail);
  if (undercured > 0) out.push_back(fmt::format("{} under-cured elements", undercured));
  return out;
}

// ---------------------------------------------------------------------------
// Report text

namespace {

std::string finding_value(const Finding& f) {
  return fmt::format("{} {} {} {} {} {}", f.kind, fixed6(f.time), fixed6(f.position.x), fixed6(f.position.y),
                     fixed6(f.position.z), f.detail);
}

double to_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != last) throw ReportParseError("bad number for " + key + ": " + s);
  return v;
}

Finding parse_finding(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  Finding f;
  std::string t, x, y, z;
  if (!(in >> f.kind >> t >> x >> y >> z)) throw ReportParseError("malformed finding for " + key);
  f.time = to_double(t, key);
  f.position = {to_double(x, key), to_double(y, key), to_double(z, key)};
  std::getline(in >> std::ws, f.detail);
  return f;
}

}  // namespace

std::string to_text(const SimReport& r) {
  std::string out = "format=ramcell-report-1\n";
  out += fmt::format("specimen={}\nmaterial={}\nprintable={}\n", r.specimen, r.material, r.printable() ? "true" : "false");
  out += fmt::format("reach_failures={}\n", r.reach_failures.size());
  for (std::size_t i = 0; i < r.reach_failures.size(); ++i)
    out += fmt::format("reach_failure.{}={}\n", i, finding_value(r.reach_failures[i]));
  out += fmt::format("collisions={}\n", r.collisions.size());
  for (std::size_t i = 0; i < r.collisions.size(); ++i)
    out += fmt::format("collision.{}={}\n", i, finding_value(r.collisions[i]));
  out += fmt::format("singularities={}\n", r.singularities.size());
  for (std::size_t i = 0; i < r.singularities.size(); ++i)
    out += fmt::format("singularity.{}={} {}\n", i, fixed6(r.singularities[i].enter), fixed6(r.singularities[i].exit));
  if (!r.singularities.empty())
    out += "advice=cure may be shadowed near singular configurations; add an auxiliary UV source there\n";
  if (r.dose) {
    out += fmt::format("dose.min={}\ndose.median_interior={}\ndose.min_ratio={}\ndose.worst_layer={}\n",
                       fixed6(r.dose->min_dose), fixed6(r.dose->median_dose), fixed6(r.dose->min_ratio),
                       r.dose->worst_layer);
  }
  out += fmt::format("undercured={}\nundercured.alpha_min={}\n", r.undercured, fixed6(r.alpha_min));
  if (r.dimensions) {
    const auto& d = *r.dimensions;
    out += fmt::format("predicted.length={}\npredicted.width={}\npredicted.height={}\npredicted.line_width={}\n",
                       fixed6(d.length), fixed6(d.width), fixed6(d.height), fixed6(d.line_width));
    out += fmt::format("spread.coefficient={}\nspread.note=fitted once to the fumed-silica specimens; calibration, not validation\n",
                       fixed6(r.spread_coefficient));
  }
  return out;
}

SimReport parse_report(const std::string& text) {
  SimReport r;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> kv;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw ReportParseError(fmt::format("line {}: expected key=value", number));
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (kv.empty()) return r;
  if (kv["format"] != "ramcell-report-1") throw ReportParseError("unknown report format");
  if (!kv.count("specimen")) return r;
  r.specimen = kv["specimen"];
  r.material = kv["material"];

  auto count = [&](const std::string& key) {
    if (!kv.count(key)) throw ReportParseError("missing " + key);
    const double v = to_double(kv[key], key);
    if (v < 0 || v != std::floor(v)) throw ReportParseError("bad count for " + key);
    return static_cast<std::size_t>(v);
  };
  auto item = [&](const std::string& key) {
    if (!kv.count(key)) throw ReportParseError("missing " + key);
    return kv[key];
  };
  for (std::size_t i = 0, n = count("reach_failures"); i < n; ++i) {
    const auto key = fmt::format("reach_failure.{}", i);
    r.reach_failures.push_back(parse_finding(item(key), key));
  }
  for (std::size_t i = 0, n = count("collisions"); i < n; ++i) {
    const auto key = fmt::format("collision.{}", i);
    r.collisions.push_back(parse_finding(item(key), key));
  }
  for (std::size_t i = 0, n = count("singularities"); i < n; ++i) {
    const auto key = fmt::format("singularity.{}", i);
    std::istringstream v(item(key));
    std::string a, b;
    if (!(v >> a >> b)) throw ReportParseError("malformed " + key);
    r.singularities.push_back({to_double(a, key), to_double(b, key)});
  }
  if (kv.count("dose.min")) {
    cure::DoseSummary d;
    d.min_dose = to_double(item("dose.min"), "dose.min");
    d.median_dose = to_double(item("dose.median_interior"), "dose.median_interior");
    d.min_ratio = to_double(item("dose.min_ratio"), "dose.min_ratio");
    d.worst_layer = static_cast<int>(to_double(item("dose.worst_layer"), "dose.worst_layer"));
    r.dose = d;
  }
  r.undercured = count("undercured");
  r.alpha_min = to_double(item("undercured.alpha_min"), "undercured.alpha_min");
  if (kv.count("predicted.length")) {
    cure::Dimensions d;
    d.length = to_double(item("predicted.length"), "predicted.length");
    d.width = to_double(item("predicted.width"), "predicted.width");
    d.height = to_double(item("predicted.height"), "predicted.height");
    d.line_width = to_double(item("predicted.line_width"), "predicted.line_width");
    r.dimensions = d;
    r.spread_coefficient = to_double(item("spread.coefficient"), "spread.coefficient");
  }
  if (kv.count("printable") && (kv["printable"] == "true") != r.printable())
    throw ReportParseError("printable flag disagrees with the failure lists");
  return r;
}

}  // namespace ramcell::cell
