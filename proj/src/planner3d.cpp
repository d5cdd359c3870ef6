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

#include "navkit/planner3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navkit/error.hpp"
#include "navkit/kernels/kernels.hpp"

namespace navkit {

OnlineFrame BuildOnlineFrame(const Vec3& c_r, const Vec3& goal) {
  const Vec3 to_goal = goal - c_r;
  if (to_goal.SquaredNorm() == 0.0) {
    throw Error(ErrorCode::kCoincidentPoints, "robot position equals the goal");
  }
  OnlineFrame f;
  f.origin = c_r;
  f.y_axis = to_goal.Normalized();
  const Vec3 x = Cross(f.y_axis, Vec3{0.0, 0.0, 1.0});
  f.x_axis = x.Norm() < 1e-12 ? Vec3{1.0, 0.0, 0.0} : x.Normalized();
  return f;
}

Vec2 ProjectToFrame(const OnlineFrame& frame, const Vec3& p) {
  return ProjectDirection(frame, p - frame.origin);
}

Vec3 LiftFromFrame(const OnlineFrame& frame, const Vec2& q) {
  return frame.origin + LiftDirection(frame, q);
}

Vec2 ProjectDirection(const OnlineFrame& frame, const Vec3& v) {
  return {Dot(v, frame.x_axis), Dot(v, frame.y_axis)};
}

Vec3 LiftDirection(const OnlineFrame& frame, const Vec2& v) {
  return v.x * frame.x_axis + v.y * frame.y_axis;
}

SurfaceSamples SampleEllipsoid(const Vec3& center, const Vec3& semi_axes, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "spacing must be positive");
  const double a = semi_axes.x;
  const double b = semi_axes.y;
  const double c = semi_axes.z;
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "semi-axes must be positive");
  }
  SurfaceSamples s;
  const double meridian = kPi * std::max({a, b, c});
  const auto rings = static_cast<int>(std::max(2.0, std::ceil(meridian / spacing)));
  for (int i = 0; i <= rings; ++i) {
    const double theta = kPi * i / rings;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    const double circumference = 2.0 * kPi * std::max(a, b) * st;
    const auto count = static_cast<int>(std::max(1.0, std::ceil(circumference / spacing)));
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / count;
      s.push_back(center + Vec3{a * st * std::cos(phi), b * st * std::sin(phi), c * ct});
    }
  }
  return s;
}

SurfacePoint NearestSurfacePoint(const Vec3& p, const SurfaceSamples& surface) {
  if (surface.empty()) throw Error(ErrorCode::kEmptySurfaceSet, "no surface samples");
  const kernels::NearestResult r = kernels::Active().nearest_point_3d(
      p.x, p.y, p.z, surface.xs.data(), surface.ys.data(), surface.zs.data(), surface.size());
  return {r.index, surface.at(r.index), std::sqrt(r.squared_distance)};
}

Vec3 ConfirmAvoidPoint3d(const OnlineFrame& frame, const SurfaceSamples& surface, double alpha0,
                         AvoidDirection dir, double tolerance) {
  const SurfacePoint nearest = NearestSurfacePoint(frame.origin, surface);
  if (alpha0 == 0.0) return nearest.point;
  Vec2 base = ProjectToFrame(frame, nearest.point);
  if (base.SquaredNorm() == 0.0) base = {0.0, 1.0};
  const double sense = dir == AvoidDirection::kPositive ? 1.0 : -1.0;
  const Vec2 ray = Rotate(base.Normalized(), sense * alpha0);

  std::size_t best = surface.size();
  double best_s = std::numeric_limits<double>::infinity();
  std::size_t extreme = nearest.index;
  double extreme_angle = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const Vec2 q = ProjectToFrame(frame, surface.at(i));
    const double along = Dot(q, ray);
    if (along > 0.0 && std::abs(Cross(ray, q)) <= tolerance && along < best_s) {
      best_s = along;
      best = i;
    }
    if (q.SquaredNorm() > 0.0) {
      const double angle = sense * AngleBetween(q, base);
      if (angle > extreme_angle) {
        extreme_angle = angle;
        extreme = i;
      }
    }
  }
  return surface.at(best < surface.size() ? best : extreme);
}

Vec3 PredictObstacleVelocity(std::span<const Vec3> history, const ArOptions& options) {
  if (history.size() >= MinimumHistory(options)) return PredictVelocity3(history, options);
  if (!history.empty()) return history.back();
  return {};
}

namespace {

double PredictRotation(std::span<const double> history, const ArOptions& options) {
  if (history.size() >= MinimumHistory(options)) {
    const std::size_t n = std::min<std::size_t>(history.size(),
                                                 std::max<std::size_t>(options.window, MinimumHistory(options)));
    const auto tail = history.subspan(history.size() - n);
    return PredictNext(FitAr(tail, options.max_order), tail);
  }
  return history.empty() ? 0.0 : history.back();
}

double AngleOf(const Vec3& a, const Vec3& b) {
  return std::atan2(Cross(a, b).Norm(), Dot(a, b));
}

bool InWay3d(const Vec3& c, const Vec3& goal, const ObstacleView3d& o, const Vec3& nearest,
             double margin) {
  const Vec3 to_goal = goal - c;
  if (Dot(o.mass_center - c, to_goal) > 0.0 && Dot(nearest - c, to_goal) > 0.0) return true;
  // Segment to the goal passing through or close to the cloud.
  const double len2 = to_goal.SquaredNorm();
  const SurfaceSamples& s = *o.surface;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 w = s.at(i) - c;
    const double t = std::clamp(Dot(w, to_goal) / len2, 0.0, 1.0);
    if ((w - t * to_goal).Norm() < margin) return true;
  }
  return false;
}

}  // namespace

Vec3 TurnTowards(const Vec3& heading, const Vec3& desired, const RobotCaps& caps, double dt) {
  const Vec3 d = desired.Normalized();
  Vec3 perp = d - Dot(d, heading) * heading;
  const double angle = AngleOf(heading, d);
  if (perp.Norm() < 1e-12) {
    if (Dot(d, heading) > 0.0 || d.SquaredNorm() == 0.0) return {};
    // Reversal: any perpendicular works; prefer turning within the horizontal plane.
    perp = Cross(heading, Vec3{0.0, 0.0, 1.0});
    if (perp.Norm() < 1e-12) perp = Cross(heading, Vec3{1.0, 0.0, 0.0});
  }
  perp = perp.Normalized();
  perp = (perp - Dot(perp, heading) * heading).Normalized();
  const double rate = dt > 0.0 && angle < caps.u_max * dt ? angle / dt : caps.u_max;
  Vec3 turn = rate * perp;
  turn = turn - Dot(turn, heading) * heading;
  return turn;
}

StepResult3d NavigateStep3d(const State3& state, const Vec3& goal,
                            std::span<const ObstacleView3d> obstacles,
                            const PlannerState3d& planner_state, const PlannerConfig3d& config,
                            const RobotCaps& caps, double dt) {
  const Vec3 c = state.position;
  const Vec3 h = state.heading;
  StepResult3d out;
  out.state = planner_state;
  out.d_min = std::numeric_limits<double>::infinity();
  std::vector<SurfacePoint> nearest;
  nearest.reserve(obstacles.size());
  for (const ObstacleView3d& o : obstacles) {
    nearest.push_back(NearestSurfacePoint(c, *o.surface));
    if (nearest.back().distance < out.d_min) {
      out.d_min = nearest.back().distance;
      out.nearest_id = o.id;
    }
  }
  const Vec3 to_goal = goal - c;
  if (to_goal.Norm() <= config.goal_tolerance) {
    out.terminal = true;
    out.state.mode = NavMode::kTargetApproach;
    out.state.active_id = -1;
    return out;
  }

  std::optional<std::size_t> sel;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const double d = nearest[i].distance;
    if (d > config.switch_distance || d >= best) continue;
    if (!InWay3d(c, goal, obstacles[i], nearest[i].point, config.clearance_margin)) continue;
    sel = i;
    best = d;
  }

  if (!sel) {
    const double angle = AngleOf(h, to_goal);
    double speed = angle < config.align_tolerance ? caps.v_max
                                                  : caps.v_max * std::max(0.0, std::cos(angle));
    if (dt > 0.0) speed = std::min(speed, to_goal.Norm() / dt);
    out.control = {speed, TurnTowards(h, to_goal, caps, dt)};
    out.state.mode = NavMode::kTargetApproach;
    out.state.active_id = -1;
    return out;
  }

  const ObstacleView3d& o = obstacles[*sel];
  const OnlineFrame frame = BuildOnlineFrame(c, goal);
  if (planner_state.mode != NavMode::kObstacleAvoid || planner_state.active_id != o.id) {
    const Vec2 mc = ProjectToFrame(frame, o.mass_center);
    const double alpha = mc.SquaredNorm() == 0.0 ? 0.0 : AngleBetween(mc, Vec2{0.0, 1.0});
    out.state.direction = alpha >= 0.0 ? AvoidDirection::kPositive : AvoidDirection::kNegative;
  }
  out.state.mode = NavMode::kObstacleAvoid;
  out.state.active_id = o.id;
  const AvoidDirection side = out.state.direction;

  out.predicted_velocity = PredictObstacleVelocity(o.velocity_history, config.ar);
  out.predicted_rotation = PredictRotation(o.rotation_history, config.ar);
  const Vec3 r_star = ConfirmAvoidPoint3d(frame, *o.surface, config.alpha0, Opposite(side),
                                          config.ray_tolerance);
  const Vec2 r_star2 = ProjectToFrame(frame, r_star);
  const Vec2 v_star = ProjectDirection(frame, out.predicted_velocity);
  const double radius = v_star.Norm() * config.forecast_horizon + config.clearance_margin;
  Vec2 h2 = ProjectDirection(frame, h);
  if (h2.Norm() < 1e-9) h2 = {0.0, 1.0};

  Vec2 desired2;
  if (r_star2.Norm() > radius) {
    desired2 = EvaluateForecast({0.0, 0.0}, h2, r_star2, radius, side).l_j;
  } else {
    out.emergency = true;
    Vec2 away = ProjectDirection(frame, c - nearest[*sel].point).Normalized();
    if (away.SquaredNorm() == 0.0) away = -r_star2.Normalized();
    const double lean = (kPi / 2) * std::clamp(r_star2.Norm() / radius, 0.0, 1.0);
    desired2 = Rotate(away, side == AvoidDirection::kPositive ? lean : -lean);
  }
  const Vec3 desired = LiftDirection(frame, desired2.Normalized());
  const double angle = AngleOf(h, desired);
  out.control = {caps.v_max * 0.5 * (1.0 + std::cos(angle)), TurnTowards(h, desired, caps, dt)};
  return out;
}

}  // namespace navkit
