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

#include "navkit/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navkit/error.hpp"

namespace navkit {

bool WithinCaps(const Control2& c, const RobotCaps& caps) {
  return std::isfinite(c.v) && std::isfinite(c.omega) && c.v >= 0.0 &&
         c.v <= caps.v_max * (1.0 + kControlTolerance) &&
         std::abs(c.omega) <= caps.u_max * (1.0 + kControlTolerance);
}

bool WithinCaps(const Control3& c, const Vec3& heading, const RobotCaps& caps) {
  return std::isfinite(c.speed) && IsFinite(c.turn) && c.speed >= 0.0 &&
         c.speed <= caps.v_max * (1.0 + kControlTolerance) &&
         c.turn.Norm() <= caps.u_max * (1.0 + kControlTolerance) &&
         std::abs(Dot(heading, c.turn)) <= kControlTolerance;
}

Control2 ClampControl2(const Control2& raw, const RobotCaps& caps) {
  return {std::clamp(raw.v, 0.0, caps.v_max), std::clamp(raw.omega, -caps.u_max, caps.u_max)};
}

Pose2 StepUnicycle(const Pose2& pose, const Control2& ctrl, double dt, const RobotCaps& caps) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (!WithinCaps(ctrl, caps)) {
    throw Error(ErrorCode::kControlOutOfBounds,
                "v=" + std::to_string(ctrl.v) + " omega=" + std::to_string(ctrl.omega));
  }
  const double dtheta = ctrl.omega * dt;
  // Chord of the arc: length v*dt*sin(h)/h along the mid-heading, h = dtheta/2.
  const double h = 0.5 * dtheta;
  const double sinc = std::abs(h) < 1e-4 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  const double chord = ctrl.v * dt * sinc;
  Pose2 next = pose;
  next.x += chord * std::cos(pose.theta + h);
  next.y += chord * std::sin(pose.theta + h);
  next.theta = NormalizeAngle(pose.theta + dtheta);
  return next;
}

State3 Step3d(const State3& state, const Control3& ctrl, double dt, const RobotCaps& caps) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  const Vec3& h = state.heading;
  if (std::abs(Dot(h, ctrl.turn)) > kControlTolerance) {
    throw Error(ErrorCode::kNonOrthogonalTurn, "turn vector is not orthogonal to heading");
  }
  if (!WithinCaps(ctrl, h, caps)) {
    throw Error(ErrorCode::kControlOutOfBounds, "speed or turn rate outside caps");
  }
  const double rate = ctrl.turn.Norm();
  State3 next = state;
  if (rate == 0.0) {
    next.position += (ctrl.speed * dt) * h;
    return next;
  }
  const double angle = rate * dt;
  const Vec3 toward = ctrl.turn / rate;
  next.heading = (std::cos(angle) * h + std::sin(angle) * toward).Normalized();
  // Chord of the arc with radius speed / rate.
  const double radius = ctrl.speed / rate;
  next.position += radius * (std::sin(angle) * h + (1.0 - std::cos(angle)) * toward);
  return next;
}

}  // namespace navkit
