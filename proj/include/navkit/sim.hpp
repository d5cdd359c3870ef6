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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "navkit/amaps.hpp"
#include "navkit/geometry.hpp"
#include "navkit/kinematics.hpp"
#include "navkit/planner2d.hpp"
#include "navkit/planner3d.hpp"
#include "navkit/vec.hpp"

namespace navkit {

enum class PlannerKind { kPlanner2d, kAmaps, kPlanner3d };
std::string_view ToString(PlannerKind kind);

struct ShapeSpec {
  std::string kind = "circle";  // polygon, circle, ellipse, blob, sphere, ellipsoid
  std::vector<Vec2> vertices;   // polygon outline about the mass center
  double radius = 0.5;          // circle, blob (mean), sphere
  Vec3 semi_axes{1.0, 0.5, 0.5};  // ellipse (x, y), ellipsoid
  double amplitude = 0.2;       // blob radial variation relative to radius
  int lobes = 3;                // blob harmonics
  int segments = 72;            // outline vertices for curved shapes
  double spacing = 0.1;         // surface sample spacing for 3D shapes
};

struct MotionSpec {
  std::string kind = "constant";  // constant, table, wander
  Vec3 velocity;                  // constant
  double angular_velocity = 0.0;  // constant, wander
  std::vector<Vec3> velocity_table;    // table; the last entry is held
  std::vector<double> angular_table;
  double speed = 0.0;             // wander
  double turn_sigma = 0.0;        // wander, rad/s per sqrt(s)
};

struct DeformationSpec {
  std::string kind = "none";  // none, random, table
  double rate = 0.05;         // random: max relative radial change per step
  double limit = 0.3;         // random: max relative deviation from the base shape
  std::vector<std::vector<double>> table;  // per step radial scale per vertex
};

struct ObstacleSpec {
  int id = 0;
  ShapeSpec shape;
  Vec3 center;
  double heading = 0.0;
  MotionSpec motion;
  DeformationSpec deformation;
};

struct Scenario {
  std::string name;
  int dimension = 2;
  PlannerKind planner = PlannerKind::kPlanner2d;
  Vec3 start;
  Vec3 goal;
  std::optional<double> start_heading;  // 2D; defaults to facing the goal
  RobotCaps caps{0.707, 1.414};
  double dt = 0.1;
  std::size_t horizon = 0;  // 0: derived from the straight-line distance
  std::uint64_t seed = 0;
  std::vector<ObstacleSpec> obstacles;
  PlannerConfig2d planner2d;
  PlannerConfig3d planner3d;
  AmapsConfig amaps;

  double goal_tolerance() const;
  std::size_t EffectiveHorizon() const;
};

// Obstacle motion expanded into per-step tables (horizon + 1 entries).
struct ObstacleTrack {
  int id = 0;
  bool spatial = false;
  std::vector<Vec2> body;           // outline at heading 0 about the mass center
  Vec3 semi_axes;                   // ellipsoid/sphere extents (spatial only)
  SurfaceSamples body_surface;      // samples about the mass center (spatial only)
  std::vector<Vec3> centers;
  std::vector<double> headings;
  std::vector<std::vector<double>> scales;  // empty when rigid
  double dt = 0.1;

  std::size_t steps() const { return centers.size(); }
  ObstacleBoundary BoundaryAt(std::size_t k) const;
  SurfaceSamples SurfaceAt(std::size_t k) const;
  // Signed clearance of p (negative inside).
  double ClearanceAt(std::size_t k, const Vec2& p) const;
  double ClearanceAt(std::size_t k, const Vec3& p) const;
  Vec3 VelocityAt(std::size_t k) const;
  double AngularVelocityAt(std::size_t k) const;
};

// Seed used for the run: NAVKIT_SEED when set, otherwise the scenario's.
std::uint64_t EffectiveSeed(const Scenario& s);

std::vector<ObstacleTrack> ExpandObstacles(const Scenario& s, std::uint64_t seed);

// Parses and validates a scenario. Throws kParseError (unknown keys, bad
// types) and kConstraintViolation (obstacle scripts, naming the constraint and
// the step).
Scenario ParseScenario(const std::string& json_text);
Scenario LoadScenario(const std::filesystem::path& path);
std::string ScenarioToJson(const Scenario& s);

// Checks obstacle scripts against the constraint set of the scenario's
// planner. Throws kConstraintViolation on the first violation.
void ValidateScenario(const Scenario& s, const std::vector<ObstacleTrack>& tracks);

struct TrajectoryRecord {
  double t = 0.0;
  Vec3 position;
  double theta = 0.0;  // 2D heading; unused in 3D
  double v = 0.0;
  double omega = 0.0;  // signed turn rate in 2D, |turn| in 3D
  std::string mode;
  double d_min = 0.0;
  int obstacle_id = -1;
};

struct TrajectoryLog {
  int dimension = 2;
  std::vector<TrajectoryRecord> records;
};

struct RunSummary {
  bool reached = false;
  bool collided = false;
  std::size_t steps = 0;
  double path_length = 0.0;
  double min_clearance = 0.0;
  std::string termination;  // goal, collision, horizon, error
  std::vector<std::string> violations;
};

struct RunResult {
  TrajectoryLog log;
  RunSummary summary;
  std::vector<ObstacleTrack> tracks;
};

RunResult RunSim(const Scenario& s);

// CSV with columns t,x,y[,z],theta?,v,omega,mode,dmin,obstacle_id; floats in
// shortest round-trip form.
void WriteCsv(const TrajectoryLog& log, std::ostream& out);
TrajectoryLog ReadCsv(std::istream& in);
void WriteJsonl(const TrajectoryLog& log, std::ostream& out);
std::string SummaryToJson(const RunSummary& summary);

// Robot path, obstacle outlines every `snapshot_every` steps, start and goal
// markers. 3D runs are drawn in the x-y plane.
void RenderSvg(const Scenario& s, const RunResult& run, std::ostream& out,
               std::size_t snapshot_every = 50);

std::string FormatDouble(double v);

// Random planar scenarios whose obstacle scripts satisfy the planar motion
// constraints: between one and `max_obstacles` blob obstacles wandering across
// the start-goal corridor, kept apart from each other and from start and goal.
Scenario RandomScenario2d(std::uint64_t seed, int max_obstacles = 5);

}  // namespace navkit
