// ramcell: plan, simulate, emit and report robotic UV-cure extrusion jobs.
//
// Exit codes: 0 ok, 2 usage or configuration error, 3 failed checks.

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ramcell/config.hpp"
#include "ramcell/gcode.hpp"
#include "ramcell/pipeline.hpp"

namespace {

using namespace ramcell;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kFailed = 3;

struct Options {
  std::string config;
  std::string shape;
  std::string gcode;
  std::string material;
  std::string out;
  std::vector<std::string> sets;
  bool force = false;
  std::string report;
};

config::JobConfig resolve(const Options& o) {
  config::JobConfig c;
  std::string file = o.config;
  if (file.empty())
    if (const char* env = std::getenv("RAMCELL_CONFIG")) file = env;
  if (!file.empty()) c = config::load(pipeline::read_file(file), c);
  for (const auto& s : o.sets) config::set(c, s);
  if (!o.shape.empty()) {
    c.shape = o.shape;
    c.gcode.clear();
  }
  if (!o.gcode.empty()) c.gcode = o.gcode;
  if (!o.material.empty()) c.material = o.material;
  if (!o.out.empty()) c.output = o.out;
  config::validate(c);
  return c;
}

std::string artifact(const config::JobConfig& c, const std::string& name, const std::string& ext) {
  return (fs::path(c.output) / (name + ext)).string();
}

int cmd_plan(const config::JobConfig& c) {
  const auto p = pipeline::prepare(c);
  const auto gcode_path = artifact(c, p.name, ".gcode");
  const auto csv_path = artifact(c, p.name, ".path.csv");
  const auto ini_path = artifact(c, "effective", ".ini");
  pipeline::write_file(gcode_path, gcode::emit(p.extended, {"ramcell toolpath", pipeline::kExtendedMarker}));
  pipeline::write_file(csv_path, pipeline::path_csv(p.path));
  pipeline::write_file(ini_path, config::dump(c));
  for (const auto& f : {gcode_path, csv_path, ini_path}) std::cout << f << "\n";
  return kOk;
}

void print_failures(const cell::SimReport& r) {
  for (const auto& f : r.failures()) std::cerr << "ramcell: " << f << "\n";
}

int cmd_simulate(const config::JobConfig& c) {
  const auto o = pipeline::run(c, pipeline::prepare(c));
  const auto path = artifact(c, o.input.name, ".report");
  pipeline::write_file(path, cell::to_text(o.report));
  std::cout << path << "\n";
  if (!o.report.printable()) {
    print_failures(o.report);
    return kFailed;
  }
  return kOk;
}

int cmd_emit(const config::JobConfig& c, bool force) {
  auto o = pipeline::run(c, pipeline::prepare(c));
  const auto& r = o.report;
  if (!r.printable()) {
    // --force only overrides under-cure: a program that collides or cannot
    // reach its path is never written.
    const bool only_cure = r.reach_failures.empty() && r.collisions.empty() && !o.program.empty();
    if (!(force && only_cure)) {
      print_failures(r);
      std::cerr << "ramcell: emit refused" << (only_cure ? " (use --force to accept under-cure)" : "") << "\n";
      return kFailed;
    }
    o.program.meta["forced"] = std::to_string(r.undercured) + " under-cured elements";
    o.program.failures.clear();
  }
  const auto script = artifact(c, o.input.name, ".script");
  const auto steps = artifact(c, o.input.name, ".steps.csv");
  const auto events = artifact(c, o.input.name, ".events.csv");
  pipeline::write_file(script, cell::emit_program(o.program));
  pipeline::write_file(steps, extrusion::steps_csv(o.steps));
  pipeline::write_file(events, extrusion::events_csv(o.steps));
  for (const auto& f : {script, steps, events}) std::cout << f << "\n";
  return kOk;
}

struct Band {
  const char* label;
  double cure::Dimensions::*member;
  double nominal;
  std::optional<double> measured;
  double spread = 0.0;
};

std::vector<Band> bands(const std::string& specimen) {
  using D = cure::Dimensions;
  // Length is along x, width along y. The wall's measured "width" is its
  // in-plane extent, which is our x length.
  if (specimen == "wall-50x10")
    return {{"length (x)", &D::length, 50.0, 49.76, 1.27}, {"height", &D::height, 10.0, 11.07, 0.86}};
  if (specimen == "square-30x30x8.5")
    return {{"length (x)", &D::length, 30.0, 32.01, 0.30},
            {"width (y)", &D::width, 30.0, 32.09, 0.11},
            {"height", &D::height, 8.5, 8.62, 0.19}};
  if (specimen == "rectangle-90x60")
    return {{"length (x)", &D::length, 90.0, std::nullopt}, {"width (y)", &D::width, 60.0, std::nullopt}};
  return {};
}

int cmd_report(const std::string& file) {
  cell::SimReport r;
  try {
    r = cell::parse_report(pipeline::read_file(file));
  } catch (const cell::ReportParseError& e) {
    std::cerr << "ramcell: " << file << ": " << e.what() << "\n";
    return kUsage;
  }
  if (r.specimen.empty()) {
    std::cout << "no specimens\n";
    return kOk;
  }
  std::cout << fmt::format("specimen   {} ({})\n", r.specimen, r.material);
  std::cout << fmt::format("printable  {}\n", r.printable() ? "yes" : "no");
  for (const auto& f : r.failures()) std::cout << "failure    " << f << "\n";
  if (r.dose)
    std::cout << fmt::format("dose       min/median {:.3f} (worst layer {})\n", r.dose->min_ratio, r.dose->worst_layer);
  if (!r.dimensions) return kOk;
  std::cout << "\n"
            << fmt::format("{:<12} {:>9} {:>9} {:>15} {:>9}  {}\n", "dimension", "nominal", "predicted", "measured",
                           "deviation", "in band");
  for (const auto& b : bands(r.specimen)) {
    const double v = (*r.dimensions).*b.member;
    if (b.measured) {
      const bool in = std::abs(v - *b.measured) <= b.spread;
      std::cout << fmt::format("{:<12} {:>9.2f} {:>9.2f} {:>15} {:>+9.2f}  {}\n", b.label, b.nominal, v,
                               fmt::format("{:.2f} +/- {:.2f}", *b.measured, b.spread), v - *b.measured,
                               in ? "yes" : "no");
    } else {
      std::cout << fmt::format("{:<12} {:>9.2f} {:>9.2f} {:>15} {:>+9.2f}  {}\n", b.label, b.nominal, v, "-",
                               v - b.nominal, "-");
    }
  }
  if (bands(r.specimen).empty()) {
    std::cout << fmt::format("{:<12} {:>9} {:>9.2f}\n", "length (x)", "-", r.dimensions->length);
    std::cout << fmt::format("{:<12} {:>9} {:>9.2f}\n", "width (y)", "-", r.dimensions->width);
    std::cout << fmt::format("{:<12} {:>9} {:>9.2f}\n", "height", "-", r.dimensions->height);
  }
  std::cout << fmt::format("{:<12} {:>9} {:>9.2f}\n", "line width", "-", r.dimensions->line_width);
  return kOk;
}

void add_job_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "INI configuration file (default: $RAMCELL_CONFIG)");
  sub->add_option("--shape", o.shape, "built-in shape: rectangle-90x60 | wall-50x10 | square-30x30x8.5");
  sub->add_option("--gcode", o.gcode, "g-code input file");
  sub->add_option("--material", o.material, "material name from the library");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--set", o.sets, "override one setting, section.key=value (repeatable)");
  sub->add_flag("--force", o.force, "emit despite under-cured elements");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan, simulate and emit robotic UV-cure extrusion jobs"};
  app.require_subcommand(1);
  Options o;
  auto* plan = app.add_subcommand("plan", "write g-code, oriented path and effective config");
  auto* simulate = app.add_subcommand("simulate", "plan, check and simulate; write a report");
  auto* emit = app.add_subcommand("emit", "write robot script, step schedule and I/O events");
  auto* report = app.add_subcommand("report", "print a report against measured dimensions");
  for (auto* sub : {plan, simulate, emit}) add_job_options(sub, o);
  report->add_option("file", o.report, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (report->parsed()) return cmd_report(o.report);
    const auto c = resolve(o);
    if (plan->parsed()) return cmd_plan(c);
    if (simulate->parsed()) return cmd_simulate(c);
    return cmd_emit(c, o.force);
  } catch (const config::ConfigError& e) {
    std::cerr << "ramcell: config: " << e.what() << "\n";
    return kUsage;
  } catch (const pipeline::InputError& e) {
    std::cerr << "ramcell: " << e.what() << "\n";
    return kUsage;
  } catch (const pipeline::JobFailed& e) {
    std::cerr << "ramcell: " << e.what() << "\n";
    return kFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ramcell: " << e.what() << "\n";
    return kUsage;
  }
}
