#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ramcell/extrusion.hpp"
#include "ramcell/toolpath.hpp"

namespace ramcell::cure {

using geom::Vec3;

/// Fixed UV spotlight on the end effector. The footprint is a disc of radius
/// standoff * tan(half_angle) centred under the light, which sits at
/// `tool_offset` from the nozzle in the tool frame.
struct UVSpot {
  double power = 10.0;       ///< W electrical
  double efficiency = 0.3;   ///< optical fraction reaching the bead
  double wavelength = 365.0; ///< nm, informational
  double half_angle = 24.0 * geom::kPi / 180.0;
  double standoff = 30.0;    ///< mm
  Vec3 tool_offset{-14.0, 0.0, 0.0};

  double footprint_radius() const;
  double footprint_area() const;
  double irradiance() const;  ///< W/mm^2 = J/(s mm^2)
  toolpath::UvOffset uv_offset() const { return {tool_offset}; }
};

enum class Base { acrylic, dlp };
enum class Filler { none, milled_gf, fumed_silica };

struct MaterialFormulation {
  std::string name;
  Base base = Base::dlp;
  Filler filler = Filler::none;
  double wt_pct = 0.0;
  double viscosity_index = 1.0;   ///< ordinal, larger is more viscous
  double cure_rate = 40.0;        ///< k, per J/mm^2
  double attenuation_depth = 0.5; ///< mm
  double alpha_gel = 0.3;
  double scatter = 1.0;           ///< multiplier on k

  double effective_rate() const { return cure_rate * scatter; }
  /// Dose at which alpha reaches alpha_gel.
  double gel_dose() const;
  void validate() const;
};

/// Built-in formulations: dlp-gf0, dlp-gf35, dlp-gf50, dlp-fs2.8, dlp-fs9, acrylic.
const std::vector<MaterialFormulation>& material_library();
std::optional<MaterialFormulation> find_material(const std::vector<MaterialFormulation>& lib, const std::string& name);

struct BeadElement {
  Vec3 centroid;
  Vec3 direction;  ///< unit travel direction
  double deposit_time = 0.0;
  double length = 0.0;
  double top = 0.0;  ///< z of the bead top (nozzle height)
  double initial_width = 0.0;
  double width = 0.0;
  double height = 0.0;
  double volume = 0.0;
  double dose = 0.0;   ///< J/mm^2
  double alpha = 0.0;
  double gel_time = std::numeric_limits<double>::infinity();  ///< absolute time alpha crossed alpha_gel
  int layer = 0;
};

struct DepositionMap {
  std::vector<BeadElement> elements;
  double gel_dose = std::numeric_limits<double>::infinity();

  bool empty() const { return elements.empty(); }
  double total_volume() const;
  std::vector<int> layers() const;
};

/// One element per extruding segment of the timeline's path. Width starts at
/// the nozzle diameter, height at bead_area / width. Throws
/// std::invalid_argument if a segment is longer than `res`.
DepositionMap deposit(const toolpath::Timeline& tl, const extrusion::FlowModel& f, const MaterialFormulation& m,
                      const extrusion::Nozzle& n, double res);

struct DoseSettings {
  double dt = 0.01;  ///< s
};

/// Time-stepped sweep of the spot footprint. An element inside the footprint
/// at a step midpoint receives irradiance * dt, attenuated by the bead stack
/// between it and the current nozzle height. Elements are only dosed once
/// deposited. Records when each element's dose crosses the map's gel dose.
void accumulate_dose(DepositionMap& map, const toolpath::Timeline& tl, const UVSpot& spot, double attenuation_depth,
                     const DoseSettings& s = {});

/// alpha = 1 - exp(-k dose) for every element.
void update_cure(DepositionMap& map, const MaterialFormulation& m);

struct SpreadModel {
  double coefficient = 0.5;  ///< c_spread, 1/s
  double max_dwell = 60.0;   ///< s, spreading stops here even without gelation
};

/// Frozen coefficient from the one-time fit against the fumed-silica specimens.
SpreadModel calibrated_spread();

/// width = initial * (1 + c * t_gel / eta), height keeps the volume.
void spread(DepositionMap& map, const MaterialFormulation& m, const SpreadModel& sm);

struct Dimensions {
  double length = 0.0;      ///< x extent
  double width = 0.0;       ///< y extent
  double height = 0.0;      ///< top above the table
  double line_width = 0.0;  ///< mean bead width at the probe point
  Vec3 probe;
};

/// Bounding extents of the bead rectangles. The probe is the middle of the
/// first straight run of the first layer. Throws std::invalid_argument on an
/// empty map.
Dimensions predict_dimensions(const DepositionMap& map, double table_z = 0.0);

/// Indices of elements with alpha < alpha_min, by alpha ascending.
std::vector<std::size_t> flag_undercured(const DepositionMap& map, double alpha_min);

struct DoseSummary {
  double min_dose = 0.0;
  double median_dose = 0.0;  ///< over interior elements
  double min_ratio = 0.0;    ///< worst per-layer min / interior median
  int worst_layer = 0;
};

/// Interior elements sit at least `margin` from both ends of their straight
/// run; a layer without any falls back to all of its elements.
DoseSummary dose_summary(const DepositionMap& map, double margin);
/// Elements at least `margin` from the ends of their straight run.
std::vector<bool> interior_mask(const DepositionMap& map, double margin);

/// Full chain: deposit, dose, cure, spread.
struct SimulationInputs {
  extrusion::FlowModel flow;
  extrusion::Nozzle nozzle;
  UVSpot spot;
  MaterialFormulation material;
  SpreadModel spread = calibrated_spread();
  DoseSettings dose;
  double resolution = 1.0;  ///< mm
};

/// `tl` must be built from a path already resampled to `in.resolution`.
DepositionMap simulate(const toolpath::Timeline& tl, const SimulationInputs& in);

}  // namespace ramcell::cure
