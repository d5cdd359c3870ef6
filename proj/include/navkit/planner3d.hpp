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

#include <optional>
#include <span>
#include <vector>

#include "navkit/kinematics.hpp"
#include "navkit/planner2d.hpp"
#include "navkit/predictor.hpp"
#include "navkit/vec.hpp"

namespace navkit {

// Planar frame attached to the robot: y_axis points at the goal, x_axis is
// horizontal and perpendicular to it.
struct OnlineFrame {
  Vec3 origin;
  Vec3 x_axis;
  Vec3 y_axis;

  Vec3 Normal() const { return Cross(x_axis, y_axis); }
};

// Throws kCoincidentPoints when c_r == goal.
OnlineFrame BuildOnlineFrame(const Vec3& c_r, const Vec3& goal);

Vec2 ProjectToFrame(const OnlineFrame& frame, const Vec3& p);
Vec3 LiftFromFrame(const OnlineFrame& frame, const Vec2& q);
// Frame components of a free vector, and back.
Vec2 ProjectDirection(const OnlineFrame& frame, const Vec3& v);
Vec3 LiftDirection(const OnlineFrame& frame, const Vec2& v);

// Obstacle surface as a point cloud, stored by component for the kernels.
struct SurfaceSamples {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> zs;

  std::size_t size() const { return xs.size(); }
  bool empty() const { return xs.empty(); }
  Vec3 at(std::size_t i) const { return {xs[i], ys[i], zs[i]}; }
  void push_back(const Vec3& p) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    zs.push_back(p.z);
  }
};

// Points on the ellipsoid surface, roughly `spacing` apart.
SurfaceSamples SampleEllipsoid(const Vec3& center, const Vec3& semi_axes, double spacing);

struct SurfacePoint {
  std::size_t index = 0;
  Vec3 point;
  double distance = 0.0;
};

// Lowest-index sample closest to p. Throws kEmptySurfaceSet.
SurfacePoint NearestSurfacePoint(const Vec3& p, const SurfaceSamples& surface);

// Avoid point in the frame plane: the ray from the robot through the
// projected nearest sample, rotated by alpha0 in the given sense, is matched
// against the projected cloud (samples within `tolerance` of the ray); the
// first such sample along the ray is returned. With no sample near the ray the
// sample with the extreme bearing on that side is used.
// Throws kEmptySurfaceSet.
Vec3 ConfirmAvoidPoint3d(const OnlineFrame& frame, const SurfaceSamples& surface, double alpha0,
                         AvoidDirection dir, double tolerance);

struct PlannerConfig3d {
  double alpha0 = Degrees(15.0);
  double switch_distance = 2.0;  // D, m
  double align_tolerance = Degrees(5.0);
  double goal_tolerance = 0.1;   // m
  double forecast_horizon = 1.0; // s
  double clearance_margin = 0.3; // m
  double ray_tolerance = 0.1;    // m, see ConfirmAvoidPoint3d
  ArOptions ar;
};

struct ObstacleView3d {
  int id = 0;
  const SurfaceSamples* surface = nullptr;
  Vec3 mass_center;
  // Observed velocities up to the current step, oldest first.
  std::span<const Vec3> velocity_history;
  std::span<const double> rotation_history;
};

struct PlannerState3d {
  NavMode mode = NavMode::kTargetApproach;
  int active_id = -1;
  AvoidDirection direction = AvoidDirection::kPositive;
};

struct StepResult3d {
  Control3 control;
  PlannerState3d state;
  bool terminal = false;
  bool emergency = false;
  double d_min = 0.0;
  int nearest_id = -1;
  Vec3 predicted_velocity;        // of the active obstacle
  double predicted_rotation = 0.0;
};

// Predicted velocity from the AR model, or the last observation when the
// history is too short to fit (zero when empty).
Vec3 PredictObstacleVelocity(std::span<const Vec3> history, const ArOptions& options);

// Turn vector orthogonal to `heading` rotating it towards `desired` at up to
// u_max (exactly onto it when reachable within dt).
Vec3 TurnTowards(const Vec3& heading, const Vec3& desired, const RobotCaps& caps, double dt);

StepResult3d NavigateStep3d(const State3& state, const Vec3& goal,
                            std::span<const ObstacleView3d> obstacles,
                            const PlannerState3d& planner_state, const PlannerConfig3d& config,
                            const RobotCaps& caps, double dt);

}  // namespace navkit
