// Copyright 2026 The navkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

void RequireObject(const json& j, const std::string& where,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) Fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) Fail(where, "unknown key '" + key + "'");
  }
}

double Number(const json& j, const std::string& where) {
  if (!j.is_number()) Fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Fail(where, "expected a finite number");
  return v;
}

std::string String(const json& j, const std::string& where) {
  if (!j.is_string()) Fail(where, "expected a string");
  return j.get<std::string>();
}

Vec3 Point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) Fail(where, "expected [x, y] or [x, y, z]");
  Vec3 p{Number(j[0], where + "[0]"), Number(j[1], where + "[1]"), 0.0};
  if (j.size() == 3) p.z = Number(j[2], where + "[2]");
  return p;
}

template <typename T>
void Optional(const json& j, const char* key, T& out, auto convert) {
  if (j.contains(key)) out = convert(j.at(key));
}

ShapeSpec ParseShape(const json& j, const std::string& where) {
  RequireObject(j, where, {"kind", "vertices", "radius", "semi_axes", "amplitude", "lobes",
                           "segments", "spacing"});
  ShapeSpec s;
  if (!j.contains("kind")) Fail(where, "missing 'kind'");
  s.kind = String(j.at("kind"), where + ".kind");
  if (j.contains("vertices")) {
    const json& v = j.at("vertices");
    if (!v.is_array()) Fail(where + ".vertices", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.vertices.push_back(Point(v[i], where + ".vertices[" + std::to_string(i) + "]").Xy());
    }
  }
  Optional(j, "radius", s.radius, [&](const json& x) { return Number(x, where + ".radius"); });
  Optional(j, "semi_axes", s.semi_axes, [&](const json& x) { return Point(x, where + ".semi_axes"); });
  Optional(j, "amplitude", s.amplitude, [&](const json& x) { return Number(x, where + ".amplitude"); });
  Optional(j, "lobes", s.lobes, [&](const json& x) { return static_cast<int>(Number(x, where + ".lobes")); });
  Optional(j, "segments", s.segments,
           [&](const json& x) { return static_cast<int>(Number(x, where + ".segments")); });
  Optional(j, "spacing", s.spacing, [&](const json& x) { return Number(x, where + ".spacing"); });
  if (s.kind == "polygon" && s.vertices.size() < 3) Fail(where, "polygon needs >= 3 vertices");
  if (s.kind == "ellipsoid" && j.contains("semi_axes") && j.at("semi_axes").size() != 3) {
    Fail(where + ".semi_axes", "ellipsoid needs three semi-axes");
  }
  if (s.kind != "polygon" && s.kind != "circle" && s.kind != "ellipse" && s.kind != "blob" &&
      s.kind != "sphere" && s.kind != "ellipsoid") {
    Fail(where + ".kind", "unknown shape '" + s.kind + "'");
  }
  return s;
}

MotionSpec ParseMotion(const json& j, const std::string& where) {
  RequireObject(j, where, {"kind", "velocity", "angular_velocity", "velocity_table",
                           "angular_table", "speed", "turn_sigma"});
  MotionSpec m;
  Optional(j, "kind", m.kind, [&](const json& x) { return String(x, where + ".kind"); });
  if (m.kind != "constant" && m.kind != "table" && m.kind != "wander") {
    Fail(where + ".kind", "unknown motion '" + m.kind + "'");
  }
  Optional(j, "velocity", m.velocity, [&](const json& x) { return Point(x, where + ".velocity"); });
  Optional(j, "angular_velocity", m.angular_velocity,
           [&](const json& x) { return Number(x, where + ".angular_velocity"); });
  Optional(j, "speed", m.speed, [&](const json& x) { return Number(x, where + ".speed"); });
  Optional(j, "turn_sigma", m.turn_sigma, [&](const json& x) { return Number(x, where + ".turn_sigma"); });
  if (j.contains("velocity_table")) {
    const json& t = j.at("velocity_table");
    if (!t.is_array()) Fail(where + ".velocity_table", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      m.velocity_table.push_back(Point(t[i], where + ".velocity_table[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("angular_table")) {
    const json& t = j.at("angular_table");
    if (!t.is_array()) Fail(where + ".angular_table", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      m.angular_table.push_back(Number(t[i], where + ".angular_table[" + std::to_string(i) + "]"));
    }
  }
  return m;
}

DeformationSpec ParseDeformation(const json& j, const std::string& where) {
  RequireObject(j, where, {"kind", "rate", "limit", "table"});
  DeformationSpec d;
  Optional(j, "kind", d.kind, [&](const json& x) { return String(x, where + ".kind"); });
  if (d.kind != "none" && d.kind != "random" && d.kind != "table") {
    Fail(where + ".kind", "unknown deformation '" + d.kind + "'");
  }
  Optional(j, "rate", d.rate, [&](const json& x) { return Number(x, where + ".rate"); });
  Optional(j, "limit", d.limit, [&](const json& x) { return Number(x, where + ".limit"); });
  if (d.limit < 0.0 || d.limit >= 1.0) Fail(where + ".limit", "must lie in [0, 1)");
  if (j.contains("table")) {
    const json& t = j.at("table");
    if (!t.is_array()) Fail(where + ".table", "expected an array of rows");
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (!t[k].is_array()) Fail(where + ".table[" + std::to_string(k) + "]", "expected an array");
      std::vector<double> row;
      for (std::size_t i = 0; i < t[k].size(); ++i) row.push_back(Number(t[k][i], where + ".table"));
      d.table.push_back(std::move(row));
    }
  }
  return d;
}

void ParsePlannerConfig(const json& j, Scenario& s) {
  const std::string where = "planner_config";
  RequireObject(j, where, {"alpha0", "switch_distance", "align_tolerance", "forecast_horizon",
                           "clearance_margin", "L", "D", "cell_size", "window", "ar_window",
                           "ar_max_order", "ray_tolerance"});
  auto num = [&](const char* key) { return Number(j.at(key), where + "." + key); };
  if (j.contains("alpha0")) s.planner2d.alpha0 = s.planner3d.alpha0 = num("alpha0");
  if (j.contains("switch_distance")) s.planner2d.switch_distance = num("switch_distance");
  if (j.contains("align_tolerance")) {
    s.planner2d.align_tolerance = s.planner3d.align_tolerance = num("align_tolerance");
  }
  if (j.contains("forecast_horizon")) {
    s.planner2d.forecast_horizon = s.planner3d.forecast_horizon = num("forecast_horizon");
  }
  if (j.contains("clearance_margin")) {
    s.planner2d.clearance_margin = s.planner3d.clearance_margin = s.amaps.clearance_margin =
        num("clearance_margin");
  }
  if (j.contains("L")) s.amaps.switch_distance = num("L");
  if (j.contains("D")) s.planner3d.switch_distance = num("D");
  if (j.contains("cell_size")) s.amaps.cell_size = num("cell_size");
  if (j.contains("window")) s.amaps.window = static_cast<std::size_t>(num("window"));
  if (j.contains("ar_window")) s.planner3d.ar.window = static_cast<int>(num("ar_window"));
  if (j.contains("ar_max_order")) s.planner3d.ar.max_order = static_cast<int>(num("ar_max_order"));
  if (j.contains("ray_tolerance")) s.planner3d.ray_tolerance = num("ray_tolerance");
  if (!(s.planner2d.alpha0 > 0.0 && s.planner2d.alpha0 <= kPi / 4 + 1e-12)) {
    Fail(where + ".alpha0", "must lie in (0, pi/4]");
  }
  if (!(s.planner2d.switch_distance > 0.0) || !(s.planner3d.switch_distance > 0.0) ||
      !(s.amaps.switch_distance > 0.0)) {
    Fail(where, "switch distances must be positive");
  }
  if (!(s.amaps.cell_size > 0.0) || s.amaps.window == 0) Fail(where, "grid needs cell_size > 0, window >= 1");
  if (s.planner3d.ar.max_order < 1 || s.planner3d.ar.window < 1) Fail(where, "AR order and window must be >= 1");
}

json PointJson(const Vec3& p, int dimension) {
  if (dimension == 2) return json::array({p.x, p.y});
  return json::array({p.x, p.y, p.z});
}

}  // namespace

std::string_view ToString(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kPlanner2d: return "planner2d";
    case PlannerKind::kAmaps: return "amaps";
    case PlannerKind::kPlanner3d: return "planner3d";
  }
  return "planner2d";
}

double Scenario::goal_tolerance() const {
  switch (planner) {
    case PlannerKind::kPlanner2d: return planner2d.goal_tolerance;
    case PlannerKind::kAmaps: return amaps.goal_tolerance;
    case PlannerKind::kPlanner3d: return planner3d.goal_tolerance;
  }
  return 0.1;
}

std::size_t Scenario::EffectiveHorizon() const {
  if (horizon > 0) return horizon;
  const double straight = Distance(start, goal);
  return static_cast<std::size_t>(std::ceil(10.0 * straight / (caps.v_max * dt)));
}

Scenario ParseScenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid JSON: ") + e.what());
  }
  RequireObject(j, "scenario", {"name", "dimension", "planner", "start", "goal", "start_heading",
                                "caps", "dt", "horizon", "goal_tolerance", "seed", "obstacles",
                                "planner_config"});
  Scenario s;
  Optional(j, "name", s.name, [](const json& x) { return String(x, "name"); });
  Optional(j, "dimension", s.dimension, [](const json& x) { return static_cast<int>(Number(x, "dimension")); });
  if (s.dimension != 2 && s.dimension != 3) Fail("dimension", "must be 2 or 3");
  s.planner = s.dimension == 3 ? PlannerKind::kPlanner3d : PlannerKind::kPlanner2d;
  if (j.contains("planner")) {
    const std::string p = String(j.at("planner"), "planner");
    if (p == "planner2d") s.planner = PlannerKind::kPlanner2d;
    else if (p == "amaps") s.planner = PlannerKind::kAmaps;
    else if (p == "planner3d") s.planner = PlannerKind::kPlanner3d;
    else Fail("planner", "unknown planner '" + p + "'");
  }
  if ((s.planner == PlannerKind::kPlanner3d) != (s.dimension == 3)) {
    Fail("planner", "planner3d requires dimension 3 and vice versa");
  }
  if (!j.contains("start") || !j.contains("goal")) Fail("scenario", "start and goal are required");
  s.start = Point(j.at("start"), "start");
  s.goal = Point(j.at("goal"), "goal");
  if (j.contains("start_heading")) s.start_heading = Number(j.at("start_heading"), "start_heading");
  if (j.contains("caps")) {
    const json& c = j.at("caps");
    RequireObject(c, "caps", {"v_max", "u_max"});
    Optional(c, "v_max", s.caps.v_max, [](const json& x) { return Number(x, "caps.v_max"); });
    Optional(c, "u_max", s.caps.u_max, [](const json& x) { return Number(x, "caps.u_max"); });
  }
  if (!(s.caps.v_max > 0.0) || !(s.caps.u_max > 0.0)) Fail("caps", "v_max and u_max must be positive");
  Optional(j, "dt", s.dt, [](const json& x) { return Number(x, "dt"); });
  if (!(s.dt > 0.0)) Fail("dt", "must be positive");
  if (j.contains("horizon")) {
    const double h = Number(j.at("horizon"), "horizon");
    if (h < 1.0 || h != std::floor(h)) Fail("horizon", "must be a positive integer");
    s.horizon = static_cast<std::size_t>(h);
  }
  if (j.contains("goal_tolerance")) {
    const double g = Number(j.at("goal_tolerance"), "goal_tolerance");
    if (!(g > 0.0)) Fail("goal_tolerance", "must be positive");
    s.planner2d.goal_tolerance = s.planner3d.goal_tolerance = s.amaps.goal_tolerance = g;
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) Fail("seed", "expected a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("planner_config")) ParsePlannerConfig(j.at("planner_config"), s);
  if (j.contains("obstacles")) {
    const json& obs = j.at("obstacles");
    if (!obs.is_array()) Fail("obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string where = "obstacles[" + std::to_string(i) + "]";
      const json& o = obs[i];
      RequireObject(o, where, {"id", "shape", "center", "heading", "motion", "deformation"});
      ObstacleSpec spec;
      spec.id = static_cast<int>(i);
      Optional(o, "id", spec.id, [&](const json& x) { return static_cast<int>(Number(x, where + ".id")); });
      if (!o.contains("shape") || !o.contains("center")) Fail(where, "shape and center are required");
      spec.shape = ParseShape(o.at("shape"), where + ".shape");
      spec.center = Point(o.at("center"), where + ".center");
      Optional(o, "heading", spec.heading, [&](const json& x) { return Number(x, where + ".heading"); });
      if (o.contains("motion")) spec.motion = ParseMotion(o.at("motion"), where + ".motion");
      if (o.contains("deformation")) {
        spec.deformation = ParseDeformation(o.at("deformation"), where + ".deformation");
      }
      const bool spatial = spec.shape.kind == "sphere" || spec.shape.kind == "ellipsoid";
      if (spatial != (s.dimension == 3)) {
        Fail(where + ".shape", "shape kind does not match the scenario dimension");
      }
      s.obstacles.push_back(std::move(spec));
    }
  }
  if (Distance(s.start, s.goal) == 0.0) Fail("goal", "start and goal coincide");
  ValidateScenario(s, ExpandObstacles(s, EffectiveSeed(s)));
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scenario s = ParseScenario(buffer.str());
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

namespace {

[[noreturn]] void Violation(int id, std::size_t step, const std::string& constraint,
                            const std::string& detail) {
  throw Error(ErrorCode::kConstraintViolation, "obstacle " + std::to_string(id) + " step " +
                                                   std::to_string(step) + ": " + constraint +
                                                   " constraint violated (" + detail + ")");
}

}  // namespace

void ValidateScenario(const Scenario& s, const std::vector<ObstacleTrack>& tracks) {
  for (const ObstacleTrack& t : tracks) {
    ObstacleBoundary body{t.body, {}};
    try {
      ValidateBoundary(body);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, "obstacle " + std::to_string(t.id) + ": " + e.what());
    }
    const bool planar_start = !t.spatial;
    const double start_clear = planar_start ? t.ClearanceAt(0, s.start.Xy()) : t.ClearanceAt(0, s.start);
    if (start_clear <= 0.0) {
      throw Error(ErrorCode::kParseError, "obstacle " + std::to_string(t.id) + " covers the start");
    }

    std::map<double, double> excursion_cache;
    for (std::size_t k = 0; k + 1 < t.steps(); ++k) {
      const double speed = t.VelocityAt(k).Norm();
      const double turn = t.AngularVelocityAt(k);
      if (speed >= s.caps.v_max) {
        Violation(t.id, k, "obstacle-speed",
                  "|v_i| = " + FormatDouble(speed) + " must stay below v_max = " + FormatDouble(s.caps.v_max));
      }
      if (std::abs(turn) >= s.caps.u_max) {
        Violation(t.id, k, "obstacle-turn-rate",
                  "|u_i| = " + FormatDouble(std::abs(turn)) + " must stay below u_max = " +
                      FormatDouble(s.caps.u_max));
      }
      if (s.planner == PlannerKind::kPlanner2d && turn != 0.0) {
        const double rot = turn * s.dt;
        double excursion;
        if (t.scales.empty()) {
          // Rigid outline: the excursion does not depend on the current pose.
          auto it = excursion_cache.find(rot);
          if (it == excursion_cache.end()) {
            it = excursion_cache.emplace(rot, RotationExcursion(body, rot)).first;
          }
          excursion = it->second;
        } else {
          excursion = RotationExcursion(t.BoundaryAt(k), rot);
        }
        const double limit = (s.caps.v_max - speed) * s.dt;
        if (excursion >= limit) {
          Violation(t.id, k, "rotation-excursion",
                    "radial growth " + FormatDouble(excursion) + " per step must stay below (v_max - |v_i|) * dt = " +
                        FormatDouble(limit));
        }
      }
      if (!t.scales.empty()) {
        for (std::size_t i = 0; i < t.body.size(); ++i) {
          const double before = t.scales[k][i];
          const double after = t.scales[k + 1][i];
          if (!(before > 0.0) || !(after > 0.0) || std::abs(after - before) > 0.1 * before + 1e-12) {
            Violation(t.id, k, "deformation-rate",
                      "vertex " + std::to_string(i) + " radial scale " + FormatDouble(before) + " -> " +
                          FormatDouble(after) + " exceeds 10% per step");
          }
        }
      }
    }
  }
}

std::string ScenarioToJson(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["dimension"] = s.dimension;
  j["planner"] = std::string(ToString(s.planner));
  j["start"] = PointJson(s.start, s.dimension);
  j["goal"] = PointJson(s.goal, s.dimension);
  if (s.start_heading) j["start_heading"] = *s.start_heading;
  j["caps"] = {{"v_max", s.caps.v_max}, {"u_max", s.caps.u_max}};
  j["dt"] = s.dt;
  if (s.horizon > 0) j["horizon"] = s.horizon;
  j["goal_tolerance"] = s.goal_tolerance();
  j["seed"] = s.seed;
  json obstacles = json::array();
  for (const ObstacleSpec& o : s.obstacles) {
    json shape{{"kind", o.shape.kind}};
    if (o.shape.kind == "polygon") {
      json v = json::array();
      for (const Vec2& p : o.shape.vertices) v.push_back({p.x, p.y});
      shape["vertices"] = v;
    } else {
      shape["radius"] = o.shape.radius;
      shape["semi_axes"] = PointJson(o.shape.semi_axes, o.shape.kind == "ellipsoid" ? 3 : 2);
      shape["amplitude"] = o.shape.amplitude;
      shape["lobes"] = o.shape.lobes;
      shape["segments"] = o.shape.segments;
      if (s.dimension == 3) shape["spacing"] = o.shape.spacing;
    }
    json motion{{"kind", o.motion.kind},
                {"velocity", PointJson(o.motion.velocity, s.dimension)},
                {"angular_velocity", o.motion.angular_velocity}};
    if (o.motion.kind == "wander") {
      motion["speed"] = o.motion.speed;
      motion["turn_sigma"] = o.motion.turn_sigma;
    }
    if (o.motion.kind == "table") {
      json vt = json::array();
      for (const Vec3& v : o.motion.velocity_table) vt.push_back(PointJson(v, s.dimension));
      motion["velocity_table"] = vt;
      motion["angular_table"] = o.motion.angular_table;
    }
    json deformation{{"kind", o.deformation.kind}};
    if (o.deformation.kind == "random") {
      deformation["rate"] = o.deformation.rate;
      deformation["limit"] = o.deformation.limit;
    }
    if (o.deformation.kind == "table") deformation["table"] = o.deformation.table;
    obstacles.push_back({{"id", o.id},
                         {"shape", shape},
                         {"center", PointJson(o.center, s.dimension)},
                         {"heading", o.heading},
                         {"motion", motion},
                         {"deformation", deformation}});
  }
  j["obstacles"] = obstacles;
  j["planner_config"] = {{"alpha0", s.planner2d.alpha0},
                         {"switch_distance", s.planner2d.switch_distance},
                         {"align_tolerance", s.planner2d.align_tolerance},
                         {"forecast_horizon", s.planner2d.forecast_horizon},
                         {"clearance_margin", s.planner2d.clearance_margin},
                         {"L", s.amaps.switch_distance},
                         {"D", s.planner3d.switch_distance},
                         {"cell_size", s.amaps.cell_size},
                         {"window", s.amaps.window},
                         {"ar_window", s.planner3d.ar.window},
                         {"ar_max_order", s.planner3d.ar.max_order},
                         {"ray_tolerance", s.planner3d.ray_tolerance}};
  return j.dump(2);
}

}  // namespace navkit
