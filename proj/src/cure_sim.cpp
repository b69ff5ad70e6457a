#include "ramcell/cure_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ramcell::cure {

double UVSpot::footprint_radius() const { return standoff * std::tan(half_angle); }

double UVSpot::footprint_area() const {
  const double r = footprint_radius();
  return geom::kPi * r * r;
}

double UVSpot::irradiance() const { return power * efficiency / footprint_area(); }

double MaterialFormulation::gel_dose() const { return -std::log1p(-alpha_gel) / effective_rate(); }

void MaterialFormulation::validate() const {
  if (wt_pct < 0.0 || wt_pct > 100.0) throw std::invalid_argument(name + ": filler wt% must be in [0, 100]");
  if (!(viscosity_index > 0.0)) throw std::invalid_argument(name + ": viscosity index must be positive");
  if (!(cure_rate > 0.0)) throw std::invalid_argument(name + ": cure rate must be positive");
  if (!(attenuation_depth > 0.0)) throw std::invalid_argument(name + ": attenuation depth must be positive");
  if (!(alpha_gel > 0.0 && alpha_gel < 1.0)) throw std::invalid_argument(name + ": alpha_gel must be in (0, 1)");
  if (!(scatter >= 1.0)) throw std::invalid_argument(name + ": scatter multiplier must be >= 1");
}

const std::vector<MaterialFormulation>& material_library() {
  static const std::vector<MaterialFormulation> lib = {
      {"dlp-gf0", Base::dlp, Filler::none, 0.0, 1.0, 40.0, 0.5, 0.3, 1.0},
      {"dlp-gf35", Base::dlp, Filler::milled_gf, 35.0, 1.2, 40.0, 0.5, 0.3, 1.0},
      {"dlp-gf50", Base::dlp, Filler::milled_gf, 50.0, 4.0, 40.0, 0.5, 0.3, 1.0},
      {"dlp-fs2.8", Base::dlp, Filler::fumed_silica, 2.8, 4.0, 15.6, 0.5, 0.3, 1.0},
      {"dlp-fs9", Base::dlp, Filler::fumed_silica, 9.0, 6.0, 15.6, 0.5, 0.3, 1.0},
      {"acrylic", Base::acrylic, Filler::none, 0.0, 2.0, 400.0, 0.5, 0.3, 1.0},
  };
  return lib;
}

std::optional<MaterialFormulation> find_material(const std::vector<MaterialFormulation>& lib, const std::string& name) {
  for (const auto& m : lib)
    if (m.name == name) return m;
  return std::nullopt;
}

double DepositionMap::total_volume() const {
  double v = 0.0;
  for (const auto& e : elements) v += e.volume;
  return v;
}

std::vector<int> DepositionMap::layers() const {
  std::vector<int> out;
  for (const auto& e : elements)
    if (out.empty() || out.back() != e.layer) out.push_back(e.layer);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DepositionMap deposit(const toolpath::Timeline& tl, const extrusion::FlowModel& f, const MaterialFormulation& m,
                      const extrusion::Nozzle& n, double res) {
  if (!(res > 0.0)) throw std::invalid_argument("resolution must be positive");
  m.validate();
  DepositionMap map;
  map.gel_dose = m.gel_dose();
  const auto& path = tl.path();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& s = path[i];
    if (!s.extruding) continue;
    const double len = s.length();
    if (len > res + 1e-9) throw std::invalid_argument("toolpath must be resampled to the deposition resolution");
    BeadElement e;
    e.centroid = (s.start + s.end) * 0.5;
    e.direction = s.direction();
    e.deposit_time = tl.segment_time(i, 0.5);
    e.length = len;
    e.top = e.centroid.z;
    e.initial_width = e.width = n.diameter;
    e.volume = extrusion::bead_area(f.rate, s.speed) * len;
    e.height = e.volume / (len * e.width);
    e.layer = s.layer;
    map.elements.push_back(e);
  }
  return map;
}

void accumulate_dose(DepositionMap& map, const toolpath::Timeline& tl, const UVSpot& spot, double attenuation_depth,
                     const DoseSettings& s) {
  if (!(s.dt > 0.0)) throw std::invalid_argument("dose time step must be positive");
  if (!(attenuation_depth > 0.0)) throw std::invalid_argument("attenuation depth must be positive");
  if (map.empty() || tl.phases().empty()) return;
  const double r = spot.footprint_radius();
  const double r2 = r * r;
  const double irradiance = spot.irradiance();
  if (irradiance <= 0.0) return;

  auto& el = map.elements;
  const auto steps = static_cast<std::size_t>(std::ceil(tl.duration() / s.dt));
  std::size_t deposited = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * s.dt;
    const double t1 = std::min(t0 + s.dt, tl.duration());
    const double dt = t1 - t0;
    const double mid = 0.5 * (t0 + t1);
    while (deposited < el.size() && el[deposited].deposit_time <= mid) ++deposited;
    const auto st = tl.at(mid);
    if (!st.uv_on) continue;
    const Vec3 c = st.position + st.orientation.rotate(spot.tool_offset);
    for (std::size_t i = 0; i < deposited; ++i) {
      auto& e = el[i];
      const double dx = e.centroid.x - c.x, dy = e.centroid.y - c.y;
      if (dx * dx + dy * dy > r2) continue;
      const double depth = std::max(0.0, st.position.z - e.top);
      const double add = irradiance * dt * std::exp(-depth / attenuation_depth);
      const double before = e.dose;
      e.dose += add;
      if (before < map.gel_dose && e.dose >= map.gel_dose)
        e.gel_time = t0 + dt * (map.gel_dose - before) / add;
    }
  }
}

void update_cure(DepositionMap& map, const MaterialFormulation& m) {
  const double k = m.effective_rate();
  for (auto& e : map.elements) e.alpha = -std::expm1(-k * e.dose);
}

SpreadModel calibrated_spread() { return {0.523, 60.0}; }

void spread(DepositionMap& map, const MaterialFormulation& m, const SpreadModel& sm) {
  if (sm.coefficient < 0.0 || sm.max_dwell < 0.0) throw std::invalid_argument("spread parameters must be >= 0");
  for (auto& e : map.elements) {
    const double dwell = std::clamp(e.gel_time - e.deposit_time, 0.0, sm.max_dwell);
    e.width = e.initial_width * (1.0 + sm.coefficient * dwell / m.viscosity_index);
    e.height = e.volume / (e.length * e.width);
  }
}

Dimensions predict_dimensions(const DepositionMap& map, double table_z) {
  if (map.empty()) throw std::invalid_argument("no deposited material");
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300, top = -1e300;
  for (const auto& e : map.elements) {
    const Vec3 along = e.direction * (0.5 * e.length);
    const Vec3 h = geom::normalized(geom::horizontal(e.direction));
    const Vec3 across = Vec3{-h.y, h.x, 0.0} * (0.5 * e.width);
    for (double a : {-1.0, 1.0})
      for (double b : {-1.0, 1.0}) {
        const Vec3 p = e.centroid + along * a + across * b;
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
      }
    top = std::max(top, e.top);
  }
  Dimensions d;
  d.length = hi_x - lo_x;
  d.width = hi_y - lo_y;
  d.height = top - table_z;

  // Middle element of the first straight run of the first layer.
  const auto& el = map.elements;
  const int first_layer = el.front().layer;
  std::size_t end = 1;
  while (end < el.size() && el[end].layer == first_layer &&
         geom::dot(el[end].direction, el.front().direction) > 1.0 - 1e-9 &&
         geom::distance(el[end].centroid, el[end - 1].centroid) <= 0.5 * (el[end].length + el[end - 1].length) + 1e-6)
    ++end;
  d.probe = el[(end - 1) / 2].centroid;
  double sum = 0.0;
  int count = 0;
  for (const auto& e : el)
    if (e.layer == first_layer && geom::distance(e.centroid, d.probe) <= 1.0) {
      sum += e.width;
      ++count;
    }
  d.line_width = sum / count;
  return d;
}

std::vector<std::size_t> flag_undercured(const DepositionMap& map, double alpha_min) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < map.elements.size(); ++i)
    if (map.elements[i].alpha < alpha_min) out.push_back(i);
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return map.elements[a].alpha < map.elements[b].alpha; });
  return out;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<bool> interior_mask(const DepositionMap& map, double margin) {
  const auto& el = map.elements;
  std::vector<bool> mask(el.size(), false);
  std::size_t begin = 0;
  while (begin < el.size()) {
    std::size_t end = begin + 1;
    while (end < el.size() && el[end].layer == el[begin].layer &&
           geom::dot(el[end].direction, el[begin].direction) > 1.0 - 1e-9 &&
           geom::distance(el[end].centroid, el[end - 1].centroid) <=
               0.5 * (el[end].length + el[end - 1].length) + 1e-6)
      ++end;
    double run = 0.0;
    for (std::size_t i = begin; i < end; ++i) run += el[i].length;
    double along = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double mid = along + 0.5 * el[i].length;
      mask[i] = mid >= margin && run - mid >= margin;
      along += el[i].length;
    }
    begin = end;
  }
  return mask;
}

DoseSummary dose_summary(const DepositionMap& map, double margin) {
  DoseSummary s;
  if (map.empty()) return s;
  const auto mask = interior_mask(map, margin);
  std::map<int, std::vector<double>> all, inner;
  std::vector<double> inner_all, everything;
  s.min_dose = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.elements.size(); ++i) {
    const auto& e = map.elements[i];
    all[e.layer].push_back(e.dose);
    everything.push_back(e.dose);
    s.min_dose = std::min(s.min_dose, e.dose);
    if (mask[i]) {
      inner[e.layer].push_back(e.dose);
      inner_all.push_back(e.dose);
    }
  }
  s.median_dose = median(inner_all.empty() ? everything : inner_all);
  s.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& [layer, doses] : all) {
    const auto it = inner.find(layer);
    const double med = median(it == inner.end() ? doses : it->second);
    const double lo = *std::min_element(doses.begin(), doses.end());
    const double ratio = med > 0.0 ? lo / med : 0.0;
    if (ratio < s.min_ratio) {
      s.min_ratio = ratio;
      s.worst_layer = layer;
    }
  }
  return s;
}

DepositionMap simulate(const toolpath::Timeline& tl, const SimulationInputs& in) {
  auto map = deposit(tl, in.flow, in.material, in.nozzle, in.resolution);
  accumulate_dose(map, tl, in.spot, in.material.attenuation_depth, in.dose);
  update_cure(map, in.material);
  spread(map, in.material, in.spread);
  return map;
}

}  // namespace ramcell::cure
