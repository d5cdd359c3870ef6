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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit {
namespace {

constexpr double kPairGap = 1.2;       // m between outlines, whole horizon
constexpr double kEndpointGap = 1.0;   // m from start and goal, whole horizon
constexpr int kAttemptsPerObstacle = 40;

double Reach(const ObstacleTrack& t) {
  double scale = 1.0;
  for (const auto& row : t.scales) {
    for (double s : row) scale = std::max(scale, s);
  }
  double r = 0.0;
  for (const Vec2& v : t.body) r = std::max(r, v.Norm());
  return r * scale;
}

bool KeepsClear(const Scenario& s, const ObstacleTrack& cand, const std::vector<ObstacleTrack>& placed) {
  const double reach = Reach(cand);
  for (std::size_t k = 0; k < cand.steps(); ++k) {
    const Vec2 c = cand.centers[k].Xy();
    if (Distance(c, s.start.Xy()) - reach < kEndpointGap ||
        Distance(c, s.goal.Xy()) - reach < kEndpointGap) {
      return false;
    }
    for (const ObstacleTrack& other : placed) {
      if (Distance(c, other.centers[k].Xy()) - reach - Reach(other) < kPairGap) return false;
    }
  }
  return true;
}

}  // namespace

Scenario RandomScenario2d(std::uint64_t seed, int max_obstacles) {
  if (max_obstacles < 1) throw Error(ErrorCode::kInvalidArgument, "max_obstacles must be at least 1");
  Scenario s;
  s.name = "random_" + std::to_string(seed);
  s.dimension = 2;
  s.planner = PlannerKind::kPlanner2d;
  s.start = {0.0, 0.0, 0.0};
  s.goal = {10.0, 10.0, 0.0};
  s.seed = seed;

  std::mt19937_64 rng(seed ^ 0x5eed5eed5eed5eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  s.start_heading = uniform(-kPi, kPi);

  const int target = 1 + static_cast<int>(unit(rng) * max_obstacles) % max_obstacles;
  const Vec2 axis = (s.goal.Xy() - s.start.Xy()).Normalized();
  const double length = Distance(s.goal.Xy(), s.start.Xy());
  std::vector<ObstacleTrack> placed;

  for (int id = 0; id < target; ++id) {
    bool accepted = false;
    for (int attempt = 0; attempt < kAttemptsPerObstacle && !accepted; ++attempt) {
      ObstacleSpec o;
      o.id = id;
      o.shape.kind = "blob";
      o.shape.radius = uniform(0.4, 1.0);
      o.shape.amplitude = 0.2;
      o.shape.lobes = 3;
      const Vec2 c = s.start.Xy() + axis * (length * uniform(0.2, 0.8)) + axis.Perp() * uniform(-3.0, 3.0);
      o.center = {c.x, c.y, 0.0};
      o.heading = uniform(-kPi, kPi);
      o.motion.kind = "wander";
      o.motion.speed = uniform(0.05, 0.35);
      o.motion.turn_sigma = 0.2;
      o.motion.angular_velocity = uniform(-0.3, 0.3);
      // Initial course roughly across the start-goal diagonal.
      const double across = axis.Perp().Angle() + (unit(rng) < 0.5 ? 0.0 : kPi) + uniform(-0.6, 0.6);
      o.motion.velocity = {std::cos(across), std::sin(across), 0.0};

      Scenario trial = s;
      trial.obstacles.push_back(o);
      std::vector<ObstacleTrack> tracks = ExpandObstacles(trial, trial.seed);
      if (!KeepsClear(trial, tracks.back(), placed)) continue;
      try {
        ValidateScenario(trial, tracks);
      } catch (const Error&) {
        continue;
      }
      s.obstacles.push_back(o);
      placed.push_back(std::move(tracks.back()));
      accepted = true;
    }
    if (!accepted && !s.obstacles.empty()) break;
    if (!accepted) --id;  // at least one obstacle; keep drawing
  }
  return s;
}

}  // namespace navkit
