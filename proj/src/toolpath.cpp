#include "ramcell/toolpath.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ramcell::toolpath {

namespace {

constexpr double kDegenerate = 1e-9;
constexpr double kConnectTol = 1e-6;

double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * geom::kPi);
  if (a <= -geom::kPi) a += 2.0 * geom::kPi;
  return a;
}

Segment leg(const Vec3& from, const Vec3& to, const Segment& like) {
  Segment s = like;
  s.start = from;
  s.end = to;
  s.extruding = false;
  s.uv_on = true;
  return s;
}

}  // namespace

Rotation tool_down() { return Rotation::about_x(geom::kPi); }

double tool_yaw(const Rotation& r) {
  const Vec3 x = r.rotate({1.0, 0.0, 0.0});
  return std::atan2(x.y, x.x);
}

bool is_tool_down(const Rotation& r) { return r.rotate({0.0, 0.0, 1.0}).z < -1.0 + 1e-9; }

int layer_of(double z, double layer_height) {
  return static_cast<int>(std::floor(z / layer_height + 1e-9));
}

Toolpath::Toolpath(std::vector<Segment> segments) {
  for (const auto& s : segments) append(s);
}

void Toolpath::append(const Segment& s) {
  if (!(s.speed > 0.0) || !std::isfinite(s.speed))
    throw std::invalid_argument("segment speed must be positive");
  if (!segments_.empty() && s.layer < segments_.back().layer)
    throw std::invalid_argument("layer indices must be non-decreasing");
  if (s.length() < kDegenerate) return;
  segments_.push_back(s);
}

Toolpath add_cure_extensions(const Toolpath& t, const ExtensionPolicy& p) {
  if (p.lead_length < 0.0) throw std::invalid_argument("extension length must be >= 0");
  if (p.lead_length == 0.0) return t;

  const auto& segs = t.segments();
  const std::size_t n = segs.size();
  auto connected = [&](std::size_t a, std::size_t b) {
    return segs[b].extruding && segs[a].layer == segs[b].layer &&
           geom::distance(segs[a].end, segs[b].start) <= kConnectTol;
  };
  auto turn_angle = [](const Segment& a, const Segment& b) {
    const double c = std::clamp(geom::dot(a.direction(), b.direction()), -1.0, 1.0);
    return std::acos(c);
  };

  std::size_t last_extruding = n;
  for (std::size_t i = 0; i < n; ++i)
    if (segs[i].extruding) last_extruding = i;

  Toolpath out;
  std::size_t chain_start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Segment& s = segs[i];
    if (s.extruding && (i == 0 || !segs[i - 1].extruding || !connected(i - 1, i))) chain_start = i;
    out.append(s);
    if (!s.extruding) continue;

    const Vec3 dir = s.direction();
    const Vec3 tip = s.end + dir * p.lead_length;
    auto out_and_back = [&] {
      out.append(leg(s.end, tip, s));
      out.append(leg(tip, s.end, s));
    };

    if (i + 1 < n && connected(i, i + 1)) {
      if (turn_angle(s, segs[i + 1]) > p.corner_angle) out_and_back();
      continue;
    }
    const bool closed = i > chain_start && geom::distance(s.end, segs[chain_start].start) <= kConnectTol;
    if (closed) {
      if (turn_angle(s, segs[chain_start]) > p.corner_angle) out_and_back();
    } else if (i == last_extruding) {
      out.append(leg(s.end, tip, s));
    } else {
      out_and_back();
    }
  }
  return out;
}

Toolpath assign_orientations(const Toolpath& t, const UvOffset& uv) {
  const Vec3 spot = tool_down().rotate(uv.tool_offset);
  if (geom::norm(geom::horizontal(spot)) < 1e-12)
    throw std::invalid_argument("UV offset has no horizontal component");
  const double spot_heading = std::atan2(spot.y, spot.x);

  Toolpath out;
  double yaw = 0.0;
  for (const auto& s : t) {
    if (s.length() < kDegenerate) throw std::invalid_argument("cannot orient a zero-length segment");
    const Vec3 travel = geom::horizontal(s.end - s.start);
    if (geom::norm(travel) > kDegenerate) {
      const double heading = std::atan2(travel.y, travel.x);
      yaw = wrap_pi(heading + geom::kPi - spot_heading);
    }
    Segment o = s;
    o.orientation = Rotation::about_z(yaw) * tool_down();
    out.append(o);
  }
  return out;
}

Toolpath resample(const Toolpath& t, double max_len) {
  if (!(max_len > 0.0)) throw std::invalid_argument("resample length must be positive");
  Toolpath out;
  for (const auto& s : t) {
    const double len = s.length();
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_len - 1e-9)));
    Vec3 from = s.start;
    for (std::size_t k = 1; k <= pieces; ++k) {
      const Vec3 to = k == pieces ? s.end : s.start + (s.end - s.start) * (static_cast<double>(k) / pieces);
      Segment piece = s;
      piece.start = from;
      piece.end = to;
      out.append(piece);
      from = to;
    }
  }
  return out;
}

PathStats path_stats(const Toolpath& t) {
  PathStats st;
  std::set<int> layers;
  for (const auto& s : t) {
    const double len = s.length();
    st.total_length += len;
    if (s.extruding) {
      st.extruded_length += len;
      st.extrusion_time += len / s.speed;
    }
    layers.insert(s.layer);
  }
  st.layer_count = static_cast<int>(layers.size());
  return st;
}

Timeline::Timeline(const Toolpath& t, const MotionSettings& m) : path_(t) {
  if (!(m.reorient_rate > 0.0)) throw std::invalid_argument("reorient rate must be positive");
  const auto& segs = path_.segments();
  double now = 0.0;
  double yaw = segs.empty() ? 0.0 : tool_yaw(segs.front().orientation);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    if (i > 0) {
      const Segment& prev = segs[i - 1];
      if (geom::distance(prev.end, s.start) > kConnectTol)
        throw std::invalid_argument("toolpath is not continuous");
      const double angle = prev.orientation.angle_to(s.orientation);
      if (angle > 1e-9) {
        Phase r;
        r.kind = Phase::Kind::reorient;
        r.segment = i - 1;
        r.from = prev.orientation;
        r.to = s.orientation;
        r.uv_on = prev.uv_on && s.uv_on;
        double sweep = angle;
        if (is_tool_down(prev.orientation) && is_tool_down(s.orientation)) {
          // Pick the representative of the target yaw in [-pi, pi] nearest the
          // current (unwrapped) yaw.
          const double target = tool_yaw(s.orientation);
          double best = target;
          for (double c : {target - 2.0 * geom::kPi, target + 2.0 * geom::kPi}) {
            if (c < -geom::kPi - 1e-12 || c > geom::kPi + 1e-12) continue;
            if (std::abs(c - yaw) < std::abs(best - yaw)) best = c;
          }
          r.yaw_mode = true;
          r.yaw0 = yaw;
          r.yaw1 = best;
          sweep = std::abs(best - yaw);
          yaw = best;
        } else {
          yaw = tool_yaw(s.orientation);
        }
        r.t0 = now;
        now += sweep / m.reorient_rate;
        r.t1 = now;
        phases_.push_back(r);
      }
    }
    Phase mv;
    mv.kind = Phase::Kind::move;
    mv.segment = i;
    mv.t0 = now;
    now += s.length() / s.speed;
    mv.t1 = now;
    mv.from = mv.to = s.orientation;
    mv.extruding = s.extruding;
    mv.uv_on = s.uv_on;
    move_phase_.push_back(phases_.size());
    phases_.push_back(mv);
  }
}

ToolState Timeline::at(double t) const {
  if (phases_.empty()) return {};
  auto it = std::upper_bound(phases_.begin(), phases_.end(), t,
                             [](double v, const Phase& p) { return v < p.t0; });
  const std::size_t idx = it == phases_.begin() ? 0 : static_cast<std::size_t>(it - phases_.begin()) - 1;
  const Phase& ph = phases_[idx];
  const double span = ph.t1 - ph.t0;
  const double s = span > 0.0 ? std::clamp((t - ph.t0) / span, 0.0, 1.0) : 1.0;

  ToolState st;
  st.phase = idx;
  st.extruding = ph.extruding;
  st.uv_on = ph.uv_on;
  const Segment& seg = path_[ph.segment];
  if (ph.kind == Phase::Kind::move) {
    st.position = seg.start + (seg.end - seg.start) * s;
    st.orientation = seg.orientation;
  } else {
    st.position = seg.end;
    st.orientation = ph.yaw_mode ? Rotation::about_z(ph.yaw0 + (ph.yaw1 - ph.yaw0) * s) * tool_down()
                                 : geom::slerp(ph.from, ph.to, s);
  }
  return st;
}

double Timeline::segment_time(std::size_t i, double s) const {
  const Phase& ph = phases_[move_phase_[i]];
  return ph.t0 + (ph.t1 - ph.t0) * s;
}

}  // namespace ramcell::toolpath
