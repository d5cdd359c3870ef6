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

#include "navkit/vec.hpp"

namespace navkit {

struct RobotCaps {
  double v_max = 0.0;  // m/s
  double u_max = 0.0;  // rad/s
};

// Planar unicycle configuration; theta in (-pi, pi], counter-clockwise.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 Position() const { return {x, y}; }
  Vec2 Heading() const { return UnitFromAngle(theta); }
};

struct Control2 {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

struct State3 {
  Vec3 position;
  Vec3 heading;  // unit
};

struct Control3 {
  double speed = 0.0;  // m/s
  Vec3 turn;           // rad/s, orthogonal to the heading it is applied to
};

// Tolerance used when checking controls and unit/orthogonality invariants.
inline constexpr double kControlTolerance = 1e-9;

// Exact arc integration of the unicycle. Throws kControlOutOfBounds when the
// control violates caps, kInvalidArgument when dt <= 0.
Pose2 StepUnicycle(const Pose2& pose, const Control2& ctrl, double dt, const RobotCaps& caps);

// Rotates the heading by |turn| * dt towards `turn` and advances the position
// along the chord of the travelled arc. Throws kControlOutOfBounds or
// kNonOrthogonalTurn.
State3 Step3d(const State3& state, const Control3& ctrl, double dt, const RobotCaps& caps);

// v into [0, v_max], omega into [-u_max, u_max].
Control2 ClampControl2(const Control2& raw, const RobotCaps& caps);

bool WithinCaps(const Control2& c, const RobotCaps& caps);
bool WithinCaps(const Control3& c, const Vec3& heading, const RobotCaps& caps);

}  // namespace navkit
