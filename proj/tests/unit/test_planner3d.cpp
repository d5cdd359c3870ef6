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
#include "navkit/planner3d.hpp"

namespace navkit {
namespace {

const RobotCaps kCaps{1.0, 1.414};

TEST(Planner3d, FrameTowardY) {
  const OnlineFrame f = BuildOnlineFrame({0, 0, 0}, {0, 10, 0});
  EXPECT_EQ(f.y_axis, Vec3(0, 1, 0));
  EXPECT_NEAR(f.x_axis.x, 1.0, 1e-15);
  EXPECT_NEAR(f.x_axis.y, 0.0, 1e-15);
  EXPECT_NEAR(f.x_axis.z, 0.0, 1e-15);
}

TEST(Planner3d, FrameStraightUp) {
  const OnlineFrame f = BuildOnlineFrame({1, 2, 3}, {1, 2, 8});
  EXPECT_EQ(f.y_axis, Vec3(0, 0, 1));
  EXPECT_EQ(f.x_axis, Vec3(1, 0, 0));
}

TEST(Planner3d, FrameCoincidentThrows) {
  try {
    BuildOnlineFrame({1, 1, 1}, {1, 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoincidentPoints);
  }
}

TEST(Planner3d, RandomFramesAreOrthonormal) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const OnlineFrame f = BuildOnlineFrame(a, b);
    EXPECT_NEAR(f.x_axis.Norm(), 1.0, 1e-9);
    EXPECT_NEAR(f.y_axis.Norm(), 1.0, 1e-9);
    EXPECT_NEAR(Dot(f.x_axis, f.y_axis), 0.0, 1e-9);
    // The goal projects onto the +y axis.
    const Vec2 g = ProjectToFrame(f, b);
    EXPECT_NEAR(g.x, 0.0, 1e-9);
    EXPECT_NEAR(g.y, Distance(a, b), 1e-9);
  }
}

TEST(Planner3d, ProjectLiftRoundTrip) {
  const OnlineFrame f = BuildOnlineFrame({1, -2, 0.5}, {4, 3, 2});
  EXPECT_EQ(ProjectToFrame(f, f.origin), Vec2(0, 0));
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 q{u(rng), u(rng)};
    const Vec2 back = ProjectToFrame(f, LiftFromFrame(f, q));
    EXPECT_NEAR(back.x, q.x, 1e-12);
    EXPECT_NEAR(back.y, q.y, 1e-12);
    const Vec2 d = ProjectDirection(f, LiftDirection(f, q));
    EXPECT_NEAR(d.x, q.x, 1e-12);
    EXPECT_NEAR(d.y, q.y, 1e-12);
  }
}

TEST(Planner3d, ProjectionIgnoresSceneRotation) {
  const SurfaceSamples cloud = SampleEllipsoid({4, 1, 0.5}, {1.0, 0.6, 0.4}, 0.2);
  const Vec3 robot{0.5, -0.2, 0.1}, goal{10, 2, 0.1};
  const double a = 0.7;
  auto rot = [&](const Vec3& p) {
    return Vec3{std::cos(a) * p.x - std::sin(a) * p.y, std::sin(a) * p.x + std::cos(a) * p.y, p.z};
  };
  const OnlineFrame f1 = BuildOnlineFrame(robot, goal);
  const OnlineFrame f2 = BuildOnlineFrame(rot(robot), rot(goal));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2 p1 = ProjectToFrame(f1, cloud.at(i));
    const Vec2 p2 = ProjectToFrame(f2, rot(cloud.at(i)));
    EXPECT_NEAR(p1.Norm(), p2.Norm(), 1e-9);
    EXPECT_NEAR(p1.x, p2.x, 1e-9);
    EXPECT_NEAR(p1.y, p2.y, 1e-9);
  }
}

TEST(Planner3d, NearestSurfacePointMatchesScan) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  SurfaceSamples s;
  for (int i = 0; i < 10000; ++i) s.push_back({u(rng), u(rng), u(rng)});
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 q{u(rng) * 3, u(rng) * 3, u(rng) * 3};
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if ((s.at(i) - q).SquaredNorm() < (s.at(best) - q).SquaredNorm()) best = i;
    }
    const SurfacePoint got = NearestSurfacePoint(q, s);
    EXPECT_EQ(got.index, best);
    EXPECT_EQ(got.point, s.at(best));
  }
  try {
    NearestSurfacePoint({0, 0, 0}, SurfaceSamples{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySurfaceSet);
  }
}

TEST(Planner3d, AvoidPointOnSphere) {
  const double spacing = 0.01;
  const SurfaceSamples sphere = SampleEllipsoid({5, 0, 0}, {1, 1, 1}, spacing);
  for (const Vec3& p : {sphere.at(0), sphere.at(sphere.size() / 2)}) {
    EXPECT_NEAR(Distance(p, {5, 0, 0}), 1.0, 1e-12);
  }
  const OnlineFrame f = BuildOnlineFrame({0, 0, 0}, {10, 0, 0});
  const Vec3 straight = ConfirmAvoidPoint3d(f, sphere, 0.0, AvoidDirection::kPositive, spacing);
  EXPECT_LT(Distance(straight, {4, 0, 0}), 2 * spacing);

  // Widened ray in the frame plane against the circle where the plane cuts the sphere.
  const double a = Degrees(5.0);
  for (AvoidDirection dir : {AvoidDirection::kPositive, AvoidDirection::kNegative}) {
    const double turn = dir == AvoidDirection::kPositive ? a : -a;
    const Vec2 u = UnitFromAngle(kPi / 2 + turn);  // frame coordinates, goal on +y
    const Vec2 c = ProjectToFrame(f, {5, 0, 0});
    const double b = Dot(u, c);
    const double s = b - std::sqrt(b * b - (c.SquaredNorm() - 1.0));
    const Vec3 exact = LiftFromFrame(f, u * s);
    const Vec3 got = ConfirmAvoidPoint3d(f, sphere, a, dir, spacing);
    // Off-plane samples project into the section disc; compare in the frame.
    EXPECT_LT(Distance(ProjectToFrame(f, got), ProjectToFrame(f, exact)), 2 * spacing);
    EXPECT_LT(Distance(got, exact), 0.1);
  }
}

TEST(Planner3d, PredictsConstantVelocity) {
  const std::vector<Vec3> h(20, Vec3{0.5, 0.5, 0.0});
  EXPECT_EQ(PredictObstacleVelocity(h, ArOptions{}), Vec3(0.5, 0.5, 0.0));
  EXPECT_EQ(PredictObstacleVelocity({}, ArOptions{}), Vec3());
  const std::vector<Vec3> few{{0.1, 0, 0}, {0.2, 0, 0}};
  EXPECT_EQ(PredictObstacleVelocity(few, ArOptions{}), Vec3(0.2, 0, 0));
}

TEST(Planner3d, TurnTowardsIsOrthogonalAndBounded) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 h = Vec3{g(rng), g(rng), g(rng)}.Normalized();
    const Vec3 d{g(rng), g(rng), g(rng)};
    const Vec3 w = TurnTowards(h, d, kCaps, 0.1);
    EXPECT_LT(std::abs(Dot(w, h)), 1e-9);
    EXPECT_LE(w.Norm(), kCaps.u_max + 1e-12);
  }
  // Reachable within one step: lands exactly on the desired direction.
  const Vec3 h{1, 0, 0};
  const Vec3 d = Vec3{1, 0.05, 0}.Normalized();
  const State3 s = Step3d({{}, h}, {0.0, TurnTowards(h, d, kCaps, 0.1)}, 0.1, kCaps);
  EXPECT_NEAR(Distance(s.heading, d), 0.0, 1e-12);
}

TEST(Planner3d, NoObstaclesGoesStraight) {
  State3 st{{0, 0, 0}, Vec3{10, 0, 2}.Normalized()};
  const Vec3 goal{10, 0, 2};
  PlannerState3d ps;
  for (int k = 0; k < 200; ++k) {
    const StepResult3d r = NavigateStep3d(st, goal, {}, ps, {}, kCaps, 0.1);
    if (r.terminal) break;
    EXPECT_EQ(r.state.mode, NavMode::kTargetApproach);
    EXPECT_TRUE(WithinCaps(r.control, st.heading, kCaps));
    st = Step3d(st, r.control, 0.1, kCaps);
    // Distance from the start-goal line stays at round-off.
    const Vec3 u = goal.Normalized();
    EXPECT_LT((st.position - u * Dot(st.position, u)).Norm(), 1e-9);
  }
  EXPECT_LT(Distance(st.position, goal), 0.1 + 1e-9);
}

TEST(Planner3d, ObstacleAheadEngagesAvoidance) {
  const SurfaceSamples sphere = SampleEllipsoid({2.5, 0, 0}, {1, 1, 1}, 0.1);
  const std::vector<Vec3> vel(20, Vec3{0, 0.2, 0});
  const std::vector<double> rot(20, 0.0);
  const std::vector<ObstacleView3d> views{{3, &sphere, {2.5, 0, 0}, vel, rot}};
  const State3 st{{0, 0, 0}, {1, 0, 0}};
  const StepResult3d r = NavigateStep3d(st, {10, 0, 0}, views, {}, {}, kCaps, 0.1);
  EXPECT_EQ(r.state.mode, NavMode::kObstacleAvoid);
  EXPECT_EQ(r.state.active_id, 3);
  EXPECT_NEAR(r.d_min, 1.5, 0.01);
  EXPECT_NEAR(r.predicted_velocity.y, 0.2, 1e-12);
  EXPECT_LT(std::abs(Dot(r.control.turn, st.heading)), 1e-9);
  EXPECT_TRUE(WithinCaps(r.control, st.heading, kCaps));
}

}  // namespace
}  // namespace navkit
