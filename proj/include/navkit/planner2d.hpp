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
#include <string>
#include <vector>

#include "navkit/geometry.hpp"
#include "navkit/kinematics.hpp"
#include "navkit/vec.hpp"

namespace navkit {

enum class NavMode { kTargetApproach, kObstacleAvoid };

// Rotation sense, counter-clockwise positive.
enum class AvoidDirection { kPositive, kNegative };

enum class DirectionDecision { kPositive, kNegative, kNotInWay };

inline AvoidDirection Opposite(AvoidDirection d) {
  return d == AvoidDirection::kPositive ? AvoidDirection::kNegative : AvoidDirection::kPositive;
}

std::string_view ToString(NavMode mode);

// Angle of cR->mass_center measured from cR->target. [0, pi/2) is Positive,
// [-pi/2, 0) is Negative, anything else is not in the way.
// Throws kDegenerateGeometry when cR coincides with target or mass_center.
DirectionDecision DecideDirection(const Vec2& c_r, const Vec2& target, const Vec2& mass_center);

// Ray from c_r through the nearest boundary point, rotated by alpha0 in the
// given sense; returns its first boundary hit, or the silhouette vertex on
// that side when the ray misses. Throws kPInsideObstacle.
Vec2 WidenedNearestPoint(const Vec2& c_r, const ObstacleBoundary& obs, double alpha0,
                         AvoidDirection dir);

struct ForecastLaw {
  double gamma = 0.0;
  Vec2 l1;  // counter-clockwise tangent
  Vec2 l2;  // clockwise tangent
  double beta1 = 0.0;  // angle of v_prev measured from l1
  double beta2 = 0.0;
  int j = 1;
  Vec2 l_j;
  double beta_j = 0.0;
};

// Tangent construction on the forecast circle (center r_star, given radius)
// seen from c_r. With `side` unset J minimizes |beta| (ties pick J = 1);
// otherwise J is the tangent passing the circle on that side: kPositive keeps
// the circle on the robot's left (l2), kNegative on its right (l1).
// Throws kInsideForecastCircle, kZeroPrevVelocity.
ForecastLaw EvaluateForecast(const Vec2& c_r, const Vec2& v_prev, const Vec2& r_star,
                             double radius, std::optional<AvoidDirection> side = std::nullopt);

// Sign function of the navigation law: 0 at 0, +1 on (0, pi], -1 on (-pi, 0).
int SwitchSign(double beta);

// Navigation law: omega = -u_max * f(beta_J) turns v_prev onto l_J and
// v = min(|l_J|, v_max). When dt > 0 and |beta_J| < u_max * dt the turn is
// reduced to land exactly on l_J instead of overshooting.
Control2 ForecastControl(const Vec2& c_r, const Vec2& v_prev, const Vec2& r_star,
                         const Vec2& v_obs, const RobotCaps& caps, double dt = 0.0);

struct PlannerConfig2d {
  double alpha0 = Degrees(15.0);
  double switch_distance = 1.5;    // m
  double align_tolerance = Degrees(5.0);
  double goal_tolerance = 0.1;     // m
  // Forecast radius = |v_obs| * forecast_horizon + clearance_margin.
  double forecast_horizon = 1.0;   // s
  double clearance_margin = 0.3;   // m
};

// Obstacle as the planner sees it at the current step.
struct ObstacleView {
  int id = 0;
  const ObstacleBoundary* boundary = nullptr;
  Vec2 velocity;                  // m/s
  double angular_velocity = 0.0;  // rad/s
};

struct PlannerState2d {
  NavMode mode = NavMode::kTargetApproach;
  int active_id = -1;
  AvoidDirection direction = AvoidDirection::kPositive;
  Vec2 last_velocity;
};

struct StepResult2d {
  Control2 control;
  PlannerState2d state;  // state to pass into the next step
  bool terminal = false;
  bool emergency = false;
  double d_min = 0.0;    // to the nearest obstacle, +inf without obstacles
  int nearest_id = -1;
};

// An obstacle is in the way when the segment to the target crosses it, or
// when its mass center lies ahead of the robot (|alpha| < pi/2) and heading
// for the target would close in on its nearest boundary point.
bool InWay(const Vec2& c_r, const Vec2& target, const ObstacleBoundary& obs);

// Nearest in-way obstacle within the switch distance, if any.
std::optional<std::size_t> SelectAvoidanceTarget(const Vec2& c_r, const Vec2& target,
                                                 std::span<const ObstacleView> obstacles,
                                                 double switch_distance);

StepResult2d NavigateStep2d(const Pose2& pose, const Vec2& target,
                            std::span<const ObstacleView> obstacles, const PlannerState2d& state,
                            const PlannerConfig2d& config, const RobotCaps& caps, double dt);

// Obstacle motion over one scenario, one entry per step.
struct ObstacleMotionTrace {
  std::vector<ObstacleBoundary> boundaries;
  std::vector<Vec2> velocities;           // m/s
  std::vector<double> angular_velocities;  // rad/s
  double dt = 0.1;
};

struct ConstraintViolation {
  std::size_t step = 0;
  std::string constraint;  // "obstacle-speed", "obstacle-turn-rate", "rotation-excursion"
  double value = 0.0;
  double limit = 0.0;
};

struct ValidationReport {
  std::vector<ConstraintViolation> violations;
  std::vector<std::string> notes;
  double max_excursion = 0.0;
  bool ok() const { return violations.empty(); }
};

// Largest outward growth, along any fixed ray from the mass center, of the
// outline's radial extent while it turns by `rotation` radians. The radial
// function is sampled on a grid no coarser than `resolution`.
double RotationExcursion(const ObstacleBoundary& obs, double rotation,
                         double resolution = Degrees(0.1));

// Checks 0 < |v| < v_max, |u| < u_max and excursion < (v_max - |v|) * dt per
// step. A zero speed is reported as a note, not a violation.
ValidationReport CheckMotionConstraints(const ObstacleMotionTrace& trace, const RobotCaps& caps);

}  // namespace navkit
