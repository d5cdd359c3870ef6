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

#include "navkit/planner2d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "navkit/error.hpp"

namespace navkit {

std::string_view ToString(NavMode mode) {
  return mode == NavMode::kTargetApproach ? "M1" : "M2";
}

DirectionDecision DecideDirection(const Vec2& c_r, const Vec2& target, const Vec2& mass_center) {
  if (c_r == target || c_r == mass_center) {
    throw Error(ErrorCode::kDegenerateGeometry, "robot coincides with target or mass center");
  }
  const double alpha = AngleBetween(mass_center - c_r, target - c_r);
  if (alpha >= 0.0 && alpha < kPi / 2) return DirectionDecision::kPositive;
  if (alpha < 0.0 && alpha >= -kPi / 2) return DirectionDecision::kNegative;
  return DirectionDecision::kNotInWay;
}

Vec2 WidenedNearestPoint(const Vec2& c_r, const ObstacleBoundary& obs, double alpha0,
                         AvoidDirection dir) {
  const DistanceResult nearest = DistToObstacle(c_r, obs);
  if (alpha0 == 0.0) return nearest.closest;
  const double signed_alpha = dir == AvoidDirection::kPositive ? alpha0 : -alpha0;
  const Vec2 ray = Rotate((nearest.closest - c_r).Normalized(), signed_alpha);
  if (std::optional<Vec2> hit = RayCast(c_r, ray, obs)) return *hit;
  const Silhouette sil = ComputeSilhouette(c_r, obs);
  return dir == AvoidDirection::kPositive ? sil.max_point : sil.min_point;
}

ForecastLaw EvaluateForecast(const Vec2& c_r, const Vec2& v_prev, const Vec2& r_star,
                             double radius, std::optional<AvoidDirection> side) {
  if (v_prev.SquaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroPrevVelocity, "previous velocity is zero");
  }
  const double d = Distance(c_r, r_star);
  if (d <= radius) {
    throw Error(ErrorCode::kInsideForecastCircle,
                "robot inside forecast circle (d=" + std::to_string(d) +
                    ", r=" + std::to_string(radius) + ")");
  }
  const SidedTangents t = TangentsBySide(c_r, r_star, radius);
  ForecastLaw law;
  law.gamma = std::asin(radius / d);
  // |v| / tan(gamma) reduces to the tangent length and stays finite at r = 0.
  law.l1 = t.length * UnitFromAngle(t.ccw_angle);
  law.l2 = t.length * UnitFromAngle(t.cw_angle);
  law.beta1 = AngleBetween(v_prev, law.l1);
  law.beta2 = AngleBetween(v_prev, law.l2);
  if (side) {
    law.j = *side == AvoidDirection::kPositive ? 2 : 1;
  } else {
    law.j = std::abs(law.beta1) <= std::abs(law.beta2) ? 1 : 2;
  }
  law.l_j = law.j == 1 ? law.l1 : law.l2;
  law.beta_j = law.j == 1 ? law.beta1 : law.beta2;
  return law;
}

int SwitchSign(double beta) {
  const double b = NormalizeAngle(beta);
  if (b == 0.0) return 0;
  return b > 0.0 ? 1 : -1;
}

namespace {

double TurnRate(double beta, const RobotCaps& caps, double dt) {
  if (dt > 0.0 && std::abs(beta) < caps.u_max * dt) return -beta / dt;
  return -caps.u_max * SwitchSign(beta);
}

}  // namespace

Control2 ForecastControl(const Vec2& c_r, const Vec2& v_prev, const Vec2& r_star,
                         const Vec2& v_obs, const RobotCaps& caps, double dt) {
  const ForecastLaw law = EvaluateForecast(c_r, v_prev, r_star, v_obs.Norm());
  return ClampControl2({law.l_j.Norm(), TurnRate(law.beta_j, caps, dt)}, caps);
}

bool InWay(const Vec2& c_r, const Vec2& target, const ObstacleBoundary& obs) {
  if (SegmentHitsObstacle(c_r, target, obs)) return true;
  if (c_r == target || c_r == obs.mass_center) return false;
  if (DecideDirection(c_r, target, obs.mass_center) == DirectionDecision::kNotInWay) return false;
  const Vec2 nearest = DistToObstacle(c_r, obs).closest;
  return Dot(target - c_r, nearest - c_r) > 0.0;
}

std::optional<std::size_t> SelectAvoidanceTarget(const Vec2& c_r, const Vec2& target,
                                                 std::span<const ObstacleView> obstacles,
                                                 double switch_distance) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const ObstacleBoundary& b = *obstacles[i].boundary;
    const double d = DistToObstacle(c_r, b).distance;
    if (d > switch_distance || d >= best_d) continue;
    if (!InWay(c_r, target, b)) continue;
    best = i;
    best_d = d;
  }
  return best;
}

StepResult2d NavigateStep2d(const Pose2& pose, const Vec2& target,
                            std::span<const ObstacleView> obstacles, const PlannerState2d& state,
                            const PlannerConfig2d& config, const RobotCaps& caps, double dt) {
  const Vec2 c = pose.Position();
  const Vec2 heading = pose.Heading();
  StepResult2d out;
  out.state = state;
  out.d_min = std::numeric_limits<double>::infinity();
  for (const ObstacleView& o : obstacles) {
    const double d = DistToObstacle(c, *o.boundary).distance;
    if (d < out.d_min) {
      out.d_min = d;
      out.nearest_id = o.id;
    }
  }

  const Vec2 to_target = target - c;
  if (to_target.Norm() <= config.goal_tolerance) {
    out.terminal = true;
    out.state.mode = NavMode::kTargetApproach;
    out.state.active_id = -1;
    out.state.last_velocity = {};
    return out;
  }

  const std::optional<std::size_t> sel =
      SelectAvoidanceTarget(c, target, obstacles, config.switch_distance);
  if (!sel) {
    // Target approach with a saturated heading controller.
    const double err = AngleBetween(heading, to_target);
    double v = std::abs(err) < config.align_tolerance ? caps.v_max
                                                      : caps.v_max * std::max(0.0, std::cos(err));
    if (dt > 0.0) v = std::min(v, to_target.Norm() / dt);
    out.control = ClampControl2({v, TurnRate(err, caps, dt)}, caps);
    out.state.mode = NavMode::kTargetApproach;
    out.state.active_id = -1;
    out.state.last_velocity = out.control.v * heading;
    return out;
  }

  const ObstacleView& obs = obstacles[*sel];
  const ObstacleBoundary& boundary = *obs.boundary;
  if (state.mode != NavMode::kObstacleAvoid || state.active_id != obs.id) {
    const double alpha = c == boundary.mass_center
                             ? 0.0
                             : AngleBetween(boundary.mass_center - c, to_target);
    out.state.direction = alpha >= 0.0 ? AvoidDirection::kPositive : AvoidDirection::kNegative;
  }
  out.state.mode = NavMode::kObstacleAvoid;
  out.state.active_id = obs.id;
  const AvoidDirection side = out.state.direction;

  // The widened ray leads along the boundary in the direction of travel,
  // which is the opposite rotation sense to the side the robot passes on.
  const Vec2 r_star = WidenedNearestPoint(c, boundary, config.alpha0, Opposite(side));
  const double radius = obs.velocity.Norm() * config.forecast_horizon + config.clearance_margin;
  const double d_star = Distance(c, r_star);

  double beta;
  if (d_star > radius) {
    beta = EvaluateForecast(c, heading, r_star, radius, side).beta_j;
  } else {
    // Too close for a tangent: steer between straight away from the boundary
    // and along it, leaning further away the deeper the intrusion.
    out.emergency = true;
    const Vec2 away = (c - DistToObstacle(c, boundary).closest).Normalized();
    const double lean = (kPi / 2) * std::clamp(d_star / radius, 0.0, 1.0);
    const Vec2 desired = Rotate(away, side == AvoidDirection::kPositive ? lean : -lean);
    beta = AngleBetween(heading, desired);
  }
  const double v = caps.v_max * 0.5 * (1.0 + std::cos(beta));
  out.control = ClampControl2({v, TurnRate(beta, caps, dt)}, caps);
  out.state.last_velocity = out.control.v * heading;
  return out;
}

namespace {

// Outermost distance from the mass center along each bearing.
class RadialFunction {
 public:
  explicit RadialFunction(const ObstacleBoundary& obs) : obs_(obs) {
    const std::size_t n = obs.vertices.size();
    buckets_.resize(std::max<std::size_t>(64, n));
    const double width = 2.0 * kPi / static_cast<double>(buckets_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double a = Bearing(obs.vertices[i]);
      const double span = NormalizeAngle(Bearing(obs.vertices[(i + 1) % n]) - a);
      const double lo = std::min(a, a + span);
      const double hi = std::max(a, a + span);
      const auto first = static_cast<long>(std::floor(lo / width)) - 1;
      const auto last = static_cast<long>(std::floor(hi / width)) + 1;
      const long count = static_cast<long>(buckets_.size());
      for (long b = first; b <= last; ++b) {
        buckets_[static_cast<std::size_t>(((b % count) + count) % count)].push_back(i);
      }
    }
    width_ = width;
  }

  double operator()(double bearing) const {
    const double wrapped = Wrap(bearing);
    const auto count = buckets_.size();
    const auto b = std::min(count - 1, static_cast<std::size_t>(wrapped / width_));
    const Vec2 u = UnitFromAngle(wrapped);
    const Vec2& o = obs_.mass_center;
    double best = 0.0;
    const std::size_t n = obs_.vertices.size();
    for (std::size_t i : buckets_[b]) {
      const Vec2& a = obs_.vertices[i];
      const Vec2 e = obs_.vertices[(i + 1) % n] - a;
      const double denom = Cross(u, e);
      if (denom == 0.0) continue;
      const Vec2 w = a - o;
      const double s = Cross(w, e) / denom;
      const double t = Cross(w, u) / denom;
      if (t >= -1e-12 && t <= 1.0 + 1e-12 && s > 0.0) best = std::max(best, s);
    }
    return best;
  }

 private:
  static double Wrap(double a) {
    double r = std::fmod(a, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    return r;
  }
  double Bearing(const Vec2& p) const { return Wrap((p - obs_.mass_center).Angle()); }

  const ObstacleBoundary& obs_;
  std::vector<std::vector<std::size_t>> buckets_;
  double width_ = 1.0;
};

}  // namespace

double RotationExcursion(const ObstacleBoundary& obs, double rotation, double resolution) {
  const double delta = std::abs(rotation);
  if (delta == 0.0) return 0.0;
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be > 0");
  // Grid step divides the rotation exactly so the swept window ends on a sample.
  const auto w = static_cast<std::size_t>(std::max(1.0, std::ceil(delta / resolution)));
  const double h = delta / static_cast<double>(w);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * kPi / h));
  const double sense = rotation > 0.0 ? -1.0 : 1.0;  // where the swept material came from

  const RadialFunction radial(obs);
  std::vector<double> r(n + w);
  for (std::size_t k = 0; k < n + w; ++k) {
    r[k] = radial(sense * (static_cast<double>(k) - static_cast<double>(w)) * h);
  }
  // r[k + w] is the bearing sense*k*h; r[k + w - j] looks j steps back along the sweep.
  // Sliding maximum over the window r[k .. k + w - 1] (indices kept in a
  // monotone deque).
  double best = 0.0;
  std::deque<std::size_t> window;
  for (std::size_t i = 0; i < n + w; ++i) {
    if (i >= w) {
      const std::size_t k = i - w;
      while (!window.empty() && window.front() < k) window.pop_front();
      if (!window.empty()) best = std::max(best, r[window.front()] - r[i]);
    }
    while (!window.empty() && r[window.back()] <= r[i]) window.pop_back();
    window.push_back(i);
  }
  return best;
}

ValidationReport CheckMotionConstraints(const ObstacleMotionTrace& trace, const RobotCaps& caps) {
  ValidationReport report;
  const std::size_t steps = trace.velocities.size();
  std::size_t at_rest = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double speed = trace.velocities[k].Norm();
    const double turn = k < trace.angular_velocities.size() ? trace.angular_velocities[k] : 0.0;
    if (speed == 0.0) ++at_rest;
    if (speed >= caps.v_max) {
      report.violations.push_back({k, "obstacle-speed", speed, caps.v_max});
    }
    if (std::abs(turn) >= caps.u_max) {
      report.violations.push_back({k, "obstacle-turn-rate", std::abs(turn), caps.u_max});
    }
    if (turn != 0.0 && k < trace.boundaries.size()) {
      const double excursion = RotationExcursion(trace.boundaries[k], turn * trace.dt);
      report.max_excursion = std::max(report.max_excursion, excursion);
      const double limit = (caps.v_max - speed) * trace.dt;
      if (excursion >= limit) {
        report.violations.push_back({k, "rotation-excursion", excursion, limit});
      }
    }
  }
  if (at_rest > 0) {
    report.notes.push_back("obstacle at rest on " + std::to_string(at_rest) +
                           " step(s); the speed lower bound is strict");
  }
  return report;
}

}  // namespace navkit
