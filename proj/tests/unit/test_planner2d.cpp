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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "navkit/error.hpp"
#include "navkit/planner2d.hpp"

namespace navkit {
namespace {

const RobotCaps kCaps{0.707, 1.414};

ObstacleBoundary Box(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {(x0 + x1) / 2, (y0 + y1) / 2}};
}

ObstacleBoundary Ellipse(Vec2 c, double a, double b, int n) {
  ObstacleBoundary e;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    e.vertices.push_back(c + Vec2{a * std::cos(t), b * std::sin(t)});
  }
  e.mass_center = c;
  return e;
}

TEST(Planner2d, DecideDirection) {
  EXPECT_EQ(DecideDirection({0, 0}, {10, 10}, {6, 5}), DirectionDecision::kNegative);
  EXPECT_EQ(DecideDirection({0, 0}, {10, 10}, {5, 6}), DirectionDecision::kPositive);
  EXPECT_EQ(DecideDirection({0, 0}, {10, 10}, {5, 5}), DirectionDecision::kPositive);
  EXPECT_EQ(DecideDirection({0, 0}, {10, 10}, {-3, -3}), DirectionDecision::kNotInWay);
  EXPECT_EQ(DecideDirection({0, 0}, {10, 0}, {-1, -4}), DirectionDecision::kNotInWay);
  try {
    DecideDirection({1, 1}, {1, 1}, {5, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateGeometry);
  }
}

TEST(Planner2d, WidenedPointWithoutWidening) {
  const ObstacleBoundary b = Box(4, -1, 6, 1);
  const Vec2 r = WidenedNearestPoint({0, 0}, b, 0.0, AvoidDirection::kPositive);
  EXPECT_NEAR(r.x, 4.0, 1e-12);
  EXPECT_NEAR(r.y, 0.0, 1e-12);
}

TEST(Planner2d, WidenedPointClosedForm) {
  const ObstacleBoundary b = Box(4, -1, 6, 1);
  const double a = Degrees(5.0);
  const Vec2 pos = WidenedNearestPoint({0, 0}, b, a, AvoidDirection::kPositive);
  EXPECT_NEAR(pos.x, 4.0, 1e-9);
  EXPECT_NEAR(pos.y, 4.0 * std::tan(a), 1e-9);
  const Vec2 neg = WidenedNearestPoint({0, 0}, b, a, AvoidDirection::kNegative);
  EXPECT_NEAR(neg.y, -4.0 * std::tan(a), 1e-9);
}

TEST(Planner2d, WidenedPointOnDisc) {
  // Dense polygon of the disc centered (5, 0) with radius 1; the oracle is the
  // ray-circle quadratic.
  ObstacleBoundary disc = Ellipse({5, 0}, 1.0, 1.0, 20000);
  const double a = Degrees(5.0);
  const Vec2 got = WidenedNearestPoint({0, 0}, disc, a, AvoidDirection::kPositive);
  const Vec2 u = UnitFromAngle(a);
  const double bq = Dot(u, Vec2{5, 0});
  const double s = bq - std::sqrt(bq * bq - 24.0);
  EXPECT_NEAR(Distance(got, u * s), 0.0, 1e-6);
}

TEST(Planner2d, WidenedPointBeyondSilhouette) {
  const ObstacleBoundary b = Box(4, -1, 6, 1);
  const Vec2 r = WidenedNearestPoint({0, 0}, b, Degrees(30.0), AvoidDirection::kPositive);
  EXPECT_EQ(r, Vec2(4, 1));
  EXPECT_FALSE(RayCast({0, 0}, UnitFromAngle(Degrees(30.0)), b).has_value());
}

TEST(Planner2d, ForecastTangentConstruction) {
  const ForecastLaw f = EvaluateForecast({0, 0}, {1, 0}, {4, 0}, 2.0);
  EXPECT_NEAR(f.gamma, kPi / 6, 1e-12);
  EXPECT_NEAR(f.l1.Norm(), 2.0 / std::tan(kPi / 6), 1e-9);
  EXPECT_NEAR(f.l1.Angle(), kPi / 6, 1e-12);
  EXPECT_NEAR(f.l2.Angle(), -kPi / 6, 1e-12);
  EXPECT_EQ(f.j, 1);  // tie
  EXPECT_NEAR(f.beta_j, -kPi / 6, 1e-12);

  // omega = -u_max * f(beta_J) turns v_prev onto l_J (counter-clockwise here).
  const Control2 c = ForecastControl({0, 0}, {1, 0}, {4, 0}, {2, 0}, kCaps);
  EXPECT_EQ(c.omega, kCaps.u_max);
  EXPECT_EQ(c.v, kCaps.v_max);
}

TEST(Planner2d, ForecastStaticLimit) {
  const ForecastLaw f = EvaluateForecast({0, 0}, {1, 1}, {4, 0}, 0.0);
  EXPECT_EQ(f.gamma, 0.0);
  EXPECT_NEAR(f.l_j.Norm(), 4.0, 1e-12);
  EXPECT_NEAR(f.l_j.Angle(), 0.0, 1e-12);
}

TEST(Planner2d, ForecastAlignedGivesNoTurn) {
  const ForecastLaw f = EvaluateForecast({0, 0}, UnitFromAngle(kPi / 6), {4, 0}, 2.0);
  const Control2 c = ForecastControl({0, 0}, f.l_j, {4, 0}, {2, 0}, kCaps);
  EXPECT_EQ(c.omega, 0.0);
}

TEST(Planner2d, ForecastErrors) {
  try {
    EvaluateForecast({0, 0}, {1, 0}, {1, 0}, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsideForecastCircle);
  }
  try {
    EvaluateForecast({0, 0}, {0, 0}, {4, 0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroPrevVelocity);
  }
}

TEST(Planner2d, ForecastVectorsCompleteTheRightTriangle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5.0, 5.0), r(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 c{u(rng), u(rng)}, star{u(rng), u(rng)}, vp{u(rng), u(rng)};
    const double rho = r(rng);
    const double d = Distance(c, star);
    if (d <= rho * 1.01 || vp.Norm() < 1e-3) continue;
    const ForecastLaw f = EvaluateForecast(c, vp, star, rho);
    EXPECT_NEAR(f.l1.SquaredNorm() + rho * rho, d * d, 1e-6);
    EXPECT_NEAR(f.l2.SquaredNorm() + rho * rho, d * d, 1e-6);
    EXPECT_LE(std::abs(f.beta_j), std::max(std::abs(f.beta1), std::abs(f.beta2)));
  }
}

TEST(Planner2d, SwitchSignIsOdd) {
  EXPECT_EQ(SwitchSign(0.0), 0);
  EXPECT_EQ(SwitchSign(kPi), 1);
  EXPECT_EQ(SwitchSign(-1e-9), -1);
  for (double b = 0.01; b < kPi; b += 0.05) EXPECT_EQ(SwitchSign(-b), -SwitchSign(b));
}

TEST(Planner2d, TargetApproachOnDiagonal) {
  const StepResult2d r = NavigateStep2d({0, 0, kPi / 4}, {10, 10}, {}, {}, {}, kCaps, 0.1);
  EXPECT_EQ(r.state.mode, NavMode::kTargetApproach);
  EXPECT_DOUBLE_EQ(r.control.v, 0.707);
  EXPECT_NEAR(r.control.omega, 0.0, 1e-12);
  EXPECT_FALSE(r.terminal);
}

TEST(Planner2d, TerminalAtGoal) {
  const StepResult2d r = NavigateStep2d({10, 9.95, 0}, {10, 10}, {}, {}, {}, kCaps, 0.1);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.control.v, 0.0);
  EXPECT_EQ(r.control.omega, 0.0);
}

TEST(Planner2d, ApproachTurnsTowardTarget) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-10.0, 10.0), a(-kPi, kPi);
  for (int trial = 0; trial < 2000; ++trial) {
    const Pose2 pose{u(rng), u(rng), a(rng)};
    const Vec2 target{u(rng), u(rng)};
    if (Distance(pose.Position(), target) < 0.5) continue;
    const StepResult2d r = NavigateStep2d(pose, target, {}, {}, {}, kCaps, 0.1);
    const double err = AngleBetween(pose.Heading(), target - pose.Position());
    EXPECT_LE(r.control.omega * err, 0.0);
    EXPECT_TRUE(WithinCaps(r.control, kCaps));
    if (std::abs(err) < Degrees(5.0) && Distance(pose.Position(), target) > 0.1) {
      EXPECT_DOUBLE_EQ(r.control.v, kCaps.v_max);
    }
  }
}

TEST(Planner2d, ObstacleInPathSwitchesMode) {
  const ObstacleBoundary b = Box(1.5, -0.5, 2.5, 0.5);
  const std::vector<ObstacleView> views{{7, &b, {0.0, 0.1}, 0.0}};
  const StepResult2d r = NavigateStep2d({0.5, 0.0, 0.0}, {10, 0}, views, {}, {}, kCaps, 0.1);
  EXPECT_EQ(r.state.mode, NavMode::kObstacleAvoid);
  EXPECT_EQ(r.state.active_id, 7);
  EXPECT_NEAR(r.d_min, 1.0, 1e-12);
  EXPECT_TRUE(WithinCaps(r.control, kCaps));
}

TEST(Planner2d, SelectsNearestInWayObstacle) {
  const ObstacleBoundary far = Box(2.0, -0.5, 3.0, 0.5);
  const ObstacleBoundary near = Box(1.0, -0.3, 1.4, 0.3);
  const ObstacleBoundary behind = Box(-1.0, -0.2, -0.6, 0.2);
  const std::vector<ObstacleView> views{{0, &far, {}, 0}, {1, &near, {}, 0}, {2, &behind, {}, 0}};
  EXPECT_TRUE(InWay({0, 0}, {10, 0}, near));
  EXPECT_FALSE(InWay({0, 0}, {10, 0}, behind));
  const auto sel = SelectAvoidanceTarget({0, 0}, {10, 0}, views, 2.5);
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(*sel, 1u);
  EXPECT_FALSE(SelectAvoidanceTarget({0, 0}, {10, 0}, views, 0.5).has_value());
}

TEST(Planner2d, MotionConstraintsStaticObstacle) {
  ObstacleMotionTrace t;
  t.boundaries.assign(5, Box(0, 0, 1, 1));
  t.velocities.assign(5, Vec2{});
  t.angular_velocities.assign(5, 0.0);
  const ValidationReport r = CheckMotionConstraints(t, kCaps);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.notes.size(), 1u);
}

TEST(Planner2d, MotionConstraintsFlagSpeed) {
  ObstacleMotionTrace t;
  t.boundaries.assign(3, Box(0, 0, 1, 1));
  t.velocities = {{0.1, 0}, {0.8, 0}, {0.1, 0}};
  t.angular_velocities.assign(3, 0.0);
  const ValidationReport r = CheckMotionConstraints(t, kCaps);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].step, 1u);
  EXPECT_EQ(r.violations[0].constraint, "obstacle-speed");
}

TEST(Planner2d, DiscRotationHasNoExcursion) {
  EXPECT_LT(RotationExcursion(Ellipse({3, 4}, 1.0, 1.0, 3600), 0.1), 1e-6);
}

TEST(Planner2d, EllipseExcursionMatchesSampledOracle) {
  const double a = 2.0, b = 1.0, delta = 0.1;
  auto radial = [&](double phi) {
    const double c = std::cos(phi) / a, s = std::sin(phi) / b;
    return 1.0 / std::sqrt(c * c + s * s);
  };
  // Along a fixed ray at bearing phi the outline reaches r(phi - t) while it
  // turns by t in [0, delta].
  double oracle = 0.0;
  const int n = 20000, m = 200;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    double peak = 0.0;
    for (int j = 0; j <= m; ++j) peak = std::max(peak, radial(phi - delta * j / m));
    oracle = std::max(oracle, peak - radial(phi));
  }
  const double got = RotationExcursion(Ellipse({0, 0}, a, b, 20000), delta, Degrees(0.005));
  EXPECT_NEAR(got, oracle, 1e-6);
  EXPECT_NEAR(RotationExcursion(Ellipse({0, 0}, a, b, 20000), -delta, Degrees(0.005)), oracle, 1e-6);
}

}  // namespace
}  // namespace navkit
