#include "ramcell/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace ramcell::config {

namespace pt = boost::property_tree;

namespace {

constexpr double kDeg = geom::kPi / 180.0;

double parse_double(const std::string& text, const std::string& key) {
  std::string s = text;
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  s = s.substr(i);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key, std::size_t n) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string word;
  while (in >> word) out.push_back(parse_double(word, key));
  if (out.size() != n) throw ConfigError(fmt::format("{}: expected {} numbers, got {}", key, n, out.size()));
  return out;
}

std::string num(double v) { return fmt::format("{}", v); }

// Shortest decimal that maps back to exactly v after scaling, so 30 degrees
// prints as 30 rather than 29.999999999999996.
std::string scaled(double v, double scale) {
  if (scale == 1.0) return num(v);
  for (int digits = 1; digits <= 17; ++digits) {
    const double d = parse_double(fmt::format("{:.{}g}", v / scale, digits), "");
    if (d * scale == v) return num(d);
  }
  return num(v / scale);
}

std::string vec(const geom::Vec3& v) { return num(v.x) + " " + num(v.y) + " " + num(v.z); }

geom::Vec3 parse_vec(const std::string& text, const std::string& key) {
  const auto v = parse_list(text, key, 3);
  return {v[0], v[1], v[2]};
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

const std::map<std::string, cure::Base> kBases{{"acrylic", cure::Base::acrylic}, {"dlp", cure::Base::dlp}};
const std::map<std::string, cure::Filler> kFillers{
    {"none", cure::Filler::none}, {"milled-gf", cure::Filler::milled_gf}, {"fumed-silica", cure::Filler::fumed_silica}};

template <class E>
std::string enum_name(const std::map<std::string, E>& names, E v) {
  for (const auto& [k, e] : names)
    if (e == v) return k;
  return "?";
}

// A scalar key bound to a field: how to read it and how to write it.
struct Field {
  std::function<void(JobConfig&, const std::string&, const std::string&)> read;
  std::function<std::string(const JobConfig&)> write;
};


Field real(std::function<double&(JobConfig&)> ref, double scale = 1.0) {
  return {[ref, scale](JobConfig& c, const std::string& v, const std::string& key) { ref(c) = parse_double(v, key) * scale; },
          [ref, scale](const JobConfig& c) { return scaled(ref(const_cast<JobConfig&>(c)), scale); }};
}

Field integer(std::function<int&(JobConfig&)> ref) {
  return {[ref](JobConfig& c, const std::string& v, const std::string& key) {
            const double d = parse_double(v, key);
            if (d != static_cast<int>(d)) throw ConfigError(key + ": expected an integer");
            ref(c) = static_cast<int>(d);
          },
          [ref](const JobConfig& c) { return std::to_string(ref(const_cast<JobConfig&>(c))); }};
}

Field text(std::function<std::string&(JobConfig&)> ref) {
  return {[ref](JobConfig& c, const std::string& v, const std::string&) { ref(c) = v; },
          [ref](const JobConfig& c) { return ref(const_cast<JobConfig&>(c)); }};
}

Field flag(std::function<bool&(JobConfig&)> ref) {
  return {[ref](JobConfig& c, const std::string& v, const std::string& key) { ref(c) = parse_bool(v, key); },
          [ref](const JobConfig& c) { return std::string(ref(const_cast<JobConfig&>(c)) ? "true" : "false"); }};
}

Field vector3(std::function<geom::Vec3&(JobConfig&)> ref) {
  return {[ref](JobConfig& c, const std::string& v, const std::string& key) { ref(c) = parse_vec(v, key); },
          [ref](const JobConfig& c) { return vec(ref(const_cast<JobConfig&>(c))); }};
}

Field six(std::function<std::array<double, 6>&(JobConfig&)> ref, double scale = 1.0) {
  return {[ref, scale](JobConfig& c, const std::string& v, const std::string& key) {
            const auto l = parse_list(v, key, 6);
            for (int i = 0; i < 6; ++i) ref(c)[i] = l[i] * scale;
          },
          [ref, scale](const JobConfig& c) {
            std::string out;
            for (double x : ref(const_cast<JobConfig&>(c))) out += (out.empty() ? "" : " ") + scaled(x, scale);
            return out;
          }};
}

Field dh_column(double kinematics::DHRow::*member, double scale = 1.0) {
  return {[member, scale](JobConfig& c, const std::string& v, const std::string& key) {
            const auto l = parse_list(v, key, 6);
            for (int i = 0; i < 6; ++i) c.kinematics.dh.rows[i].*member = l[i] * scale;
          },
          [member, scale](const JobConfig& c) {
            std::string out;
            for (const auto& row : c.kinematics.dh.rows) out += (out.empty() ? "" : " ") + scaled(row.*member, scale);
            return out;
          }};
}

// Ordered so dump() writes a stable, readable file.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>& schema() {
  static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>> s = {
      {"job",
       {{"shape", text([](JobConfig& c) -> std::string& { return c.shape; })},
        {"gcode", text([](JobConfig& c) -> std::string& { return c.gcode; })},
        {"material", text([](JobConfig& c) -> std::string& { return c.material; })},
        {"speed_2d", real([](JobConfig& c) -> double& { return c.speed_2d; })},
        {"speed_3d", real([](JobConfig& c) -> double& { return c.speed_3d; })},
        {"layer_height", real([](JobConfig& c) -> double& { return c.layers.layer_height; })},
        {"first_layer_height", real([](JobConfig& c) -> double& { return c.layers.first_layer_height; })},
        {"resolution", real([](JobConfig& c) -> double& { return c.resolution; })},
        {"output", text([](JobConfig& c) -> std::string& { return c.output; })}}},
      {"extension",
       {{"lead_length", real([](JobConfig& c) -> double& { return c.extension.lead_length; })},
        {"corner_angle_deg", real([](JobConfig& c) -> double& { return c.extension.corner_angle; }, kDeg)}}},
      {"motion", {{"reorient_rate_deg_s", real([](JobConfig& c) -> double& { return c.motion.reorient_rate; }, kDeg)}}},
      {"flow",
       {{"rate", real([](JobConfig& c) -> double& { return c.flow.rate; })},
        {"nozzle_diameter", real([](JobConfig& c) -> double& { return c.nozzle.diameter; })},
        {"land_length", real([](JobConfig& c) -> double& { return c.nozzle.land_length; })},
        {"viscosity", real([](JobConfig& c) -> double& { return c.viscosity; })}}},
      {"drive",
       {{"bore_diameter", real([](JobConfig& c) -> double& { return c.drive.bore_diameter; })},
        {"capacity_ml", real([](JobConfig& c) -> double& { return c.drive.capacity_ml; })},
        {"plunger_travel", real([](JobConfig& c) -> double& { return c.drive.plunger_travel; })},
        {"lead", real([](JobConfig& c) -> double& { return c.drive.lead; })},
        {"full_steps", integer([](JobConfig& c) -> int& { return c.drive.full_steps; })},
        {"microsteps", integer([](JobConfig& c) -> int& { return c.drive.microsteps; })},
        {"efficiency", real([](JobConfig& c) -> double& { return c.drive.efficiency; })},
        {"rated_torque", real([](JobConfig& c) -> double& { return c.drive.rated_torque; })},
        {"max_step_rate", real([](JobConfig& c) -> double& { return c.drive.max_step_rate; })}}},
      {"uv",
       {{"enabled", flag([](JobConfig& c) -> bool& { return c.uv_enabled; })},
        {"power", real([](JobConfig& c) -> double& { return c.spot.power; })},
        {"efficiency", real([](JobConfig& c) -> double& { return c.spot.efficiency; })},
        {"wavelength", real([](JobConfig& c) -> double& { return c.spot.wavelength; })},
        {"half_angle_deg", real([](JobConfig& c) -> double& { return c.spot.half_angle; }, kDeg)},
        {"standoff", real([](JobConfig& c) -> double& { return c.spot.standoff; })},
        {"tool_offset", vector3([](JobConfig& c) -> geom::Vec3& { return c.spot.tool_offset; })}}},
      {"cure",
       {{"dose_dt", real([](JobConfig& c) -> double& { return c.dose.dt; })},
        {"spread_coefficient", real([](JobConfig& c) -> double& { return c.spread.coefficient; })},
        {"max_dwell", real([](JobConfig& c) -> double& { return c.spread.max_dwell; })},
        {"alpha_min", real([](JobConfig& c) -> double& { return c.alpha_min; })}}},
      {"robot",
       {{"dh_a", dh_column(&kinematics::DHRow::a)},
        {"dh_d", dh_column(&kinematics::DHRow::d)},
        {"dh_alpha_deg", dh_column(&kinematics::DHRow::alpha, kDeg)},
        {"limits_lower_deg", six([](JobConfig& c) -> std::array<double, 6>& { return c.kinematics.limits.lower; }, kDeg)},
        {"limits_upper_deg", six([](JobConfig& c) -> std::array<double, 6>& { return c.kinematics.limits.upper; }, kDeg)},
        {"tcp_offset", vector3([](JobConfig& c) -> geom::Vec3& { return c.kinematics.tcp.position; })},
        {"home_deg", six([](JobConfig& c) -> std::array<double, 6>& { return c.kinematics.home; }, kDeg)},
        {"max_joint_speed_deg_s", real([](JobConfig& c) -> double& { return c.kinematics.max_joint_speed; }, kDeg)},
        {"max_jump_deg", real([](JobConfig& c) -> double& { return c.kinematics.max_jump; }, kDeg)},
        {"rotation_step_deg", real([](JobConfig& c) -> double& { return c.kinematics.rotation_step; }, kDeg)},
        {"singular_eps", real([](JobConfig& c) -> double& { return c.kinematics.singular_eps; })}}},
      {"cell",
       {{"table_z", real([](JobConfig& c) -> double& { return c.environment.table_z; })},
        {"origin", vector3([](JobConfig& c) -> geom::Vec3& { return c.environment.print_origin; })},
        {"base_position", vector3([](JobConfig& c) -> geom::Vec3& { return c.environment.base.position; })},
        {"capsule_radius", real([](JobConfig& c) -> double& { return c.environment.effector.radius; })},
        {"capsule_length", real([](JobConfig& c) -> double& { return c.environment.effector.length; })},
        {"capsule_offset", real([](JobConfig& c) -> double& { return c.environment.effector.offset; })},
        {"sample_dt", real([](JobConfig& c) -> double& { return c.environment.sample_dt; })}}},
  };
  return s;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& [name, fields] : schema()) {
    if (name != section) continue;
    for (const auto& [k, f] : fields)
      if (k == key) return &f;
  }
  return nullptr;
}

void apply_material(JobConfig& c, const std::string& name, const std::string& key, const std::string& value) {
  auto it = std::find_if(c.materials.begin(), c.materials.end(), [&](const auto& m) { return m.name == name; });
  if (it == c.materials.end()) {
    c.materials.push_back({});
    it = c.materials.end() - 1;
    it->name = name;
  }
  auto& m = *it;
  const std::string full = "material." + name + "." + key;
  if (key == "base") {
    if (!kBases.count(value)) throw ConfigError(full + ": unknown base '" + value + "'");
    m.base = kBases.at(value);
  } else if (key == "filler") {
    if (!kFillers.count(value)) throw ConfigError(full + ": unknown filler '" + value + "'");
    m.filler = kFillers.at(value);
  } else if (key == "wt_pct") {
    m.wt_pct = parse_double(value, full);
  } else if (key == "viscosity_index") {
    m.viscosity_index = parse_double(value, full);
  } else if (key == "cure_rate") {
    m.cure_rate = parse_double(value, full);
  } else if (key == "attenuation_depth") {
    m.attenuation_depth = parse_double(value, full);
  } else if (key == "alpha_gel") {
    m.alpha_gel = parse_double(value, full);
  } else if (key == "scatter") {
    m.scatter = parse_double(value, full);
  } else {
    throw ConfigError("unknown key " + full);
  }
}

void apply_obstacle(JobConfig& c, const std::string& name, const std::string& key, const std::string& value) {
  auto& obs = c.environment.obstacles;
  auto it = std::find_if(obs.begin(), obs.end(), [&](const auto& b) { return b.name == name; });
  if (it == obs.end()) {
    obs.push_back({name, {}, {}});
    it = obs.end() - 1;
  }
  const std::string full = "obstacle." + name + "." + key;
  if (key == "lo") {
    it->lo = parse_vec(value, full);
  } else if (key == "hi") {
    it->hi = parse_vec(value, full);
  } else {
    throw ConfigError("unknown key " + full);
  }
}

void apply(JobConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  if (section.rfind("material.", 0) == 0) return apply_material(c, section.substr(9), key, value);
  if (section.rfind("obstacle.", 0) == 0) return apply_obstacle(c, section.substr(9), key, value);
  const Field* f = find_field(section, key);
  if (!f) throw ConfigError("unknown key " + section + "." + key);
  f->read(c, value, section + "." + key);
}

}  // namespace

JobConfig load(const std::string& ini, JobConfig base) {
  pt::ptree tree;
  std::istringstream in(ini);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) apply(base, section, key, value.data());
  }
  return base;
}

void set(JobConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.rfind('.', eq);
  if (eq == std::string::npos || dot == std::string::npos || dot == 0)
    throw ConfigError("override must look like section.key=value: " + assignment);
  apply(c, assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1), assignment.substr(eq + 1));
}

std::string dump(const JobConfig& c) {
  std::string out;
  for (const auto& [section, fields] : schema()) {
    out += "[" + section + "]\n";
    for (const auto& [key, f] : fields) out += key + " = " + f.write(c) + "\n";
    out += "\n";
  }
  for (const auto& b : c.environment.obstacles)
    out += fmt::format("[obstacle.{}]\nlo = {}\nhi = {}\n\n", b.name, vec(b.lo), vec(b.hi));
  for (const auto& m : c.materials) {
    out += fmt::format("[material.{}]\nbase = {}\nfiller = {}\nwt_pct = {}\nviscosity_index = {}\ncure_rate = {}\n",
                       m.name, enum_name(kBases, m.base), enum_name(kFillers, m.filler), num(m.wt_pct),
                       num(m.viscosity_index), num(m.cure_rate));
    out += fmt::format("attenuation_depth = {}\nalpha_gel = {}\nscatter = {}\n\n", num(m.attenuation_depth),
                       num(m.alpha_gel), num(m.scatter));
  }
  return out;
}

const cure::MaterialFormulation& material(const JobConfig& c) {
  for (const auto& m : c.materials)
    if (m.name == c.material) return m;
  throw ConfigError("unknown material '" + c.material + "'");
}

void validate(const JobConfig& c) {
  material(c);
  if (c.gcode.empty() && !shapes::builtin(c.shape)) throw ConfigError("unknown shape '" + c.shape + "'");
  if (!(c.speed_2d > 0.0 && c.speed_3d > 0.0)) throw ConfigError("speeds must be positive");
  if (!(c.layers.layer_height > 0.0 && c.layers.first_layer_height > 0.0))
    throw ConfigError("layer heights must be positive");
  if (!(c.resolution > 0.0)) throw ConfigError("resolution must be positive");
  if (c.extension.lead_length < 0.0) throw ConfigError("extension lead length must be >= 0");
  if (!(c.flow.rate > 0.0)) throw ConfigError("flow rate must be positive");
  if (!(c.alpha_min >= 0.0 && c.alpha_min < 1.0)) throw ConfigError("alpha_min must be in [0, 1)");
  try {
    for (const auto& m : c.materials) m.validate();
    c.drive.validate();
    c.environment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace ramcell::config
