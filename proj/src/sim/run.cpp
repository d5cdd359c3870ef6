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
#include <string>

#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit {
namespace {

double MinClearance2d(const std::vector<ObstacleTrack>& tracks, std::size_t k, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const ObstacleTrack& t : tracks) best = std::min(best, t.ClearanceAt(k, p));
  return best;
}

double MinClearance3d(const std::vector<ObstacleTrack>& tracks, std::size_t k, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const ObstacleTrack& t : tracks) best = std::min(best, t.ClearanceAt(k, p));
  return best;
}

void Finish(RunResult& run, double clearance_after_step) {
  run.summary.min_clearance = std::min(run.summary.min_clearance, clearance_after_step);
  if (clearance_after_step <= 0.0) {
    run.summary.collided = true;
    run.summary.termination = "collision";
  }
}

void Run2d(const Scenario& s, RunResult& run) {
  const std::size_t horizon = s.EffectiveHorizon();
  const Vec2 goal = s.goal.Xy();
  Pose2 pose{s.start.x, s.start.y, 0.0};
  pose.theta = s.start_heading ? NormalizeAngle(*s.start_heading) : (goal - pose.Position()).Angle();
  PlannerState2d state;
  std::vector<ObstacleBoundary> boundaries(run.tracks.size());
  std::vector<ObstacleView> views(run.tracks.size());

  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < run.tracks.size(); ++i) {
      boundaries[i] = run.tracks[i].BoundaryAt(k);
      const Vec3 v = run.tracks[i].VelocityAt(k);
      views[i] = {run.tracks[i].id, &boundaries[i], v.Xy(), run.tracks[i].AngularVelocityAt(k)};
    }
    const StepResult2d r = NavigateStep2d(pose, goal, views, state, s.planner2d, s.caps, s.dt);
    run.log.records.push_back({static_cast<double>(k) * s.dt,
                               {pose.x, pose.y, 0.0},
                               pose.theta,
                               r.control.v,
                               r.control.omega,
                               std::string(ToString(r.state.mode)),
                               r.d_min,
                               r.state.mode == NavMode::kObstacleAvoid ? r.state.active_id : -1});
    run.summary.min_clearance = std::min(run.summary.min_clearance, r.d_min);
    if (r.terminal) {
      run.summary.reached = true;
      run.summary.termination = "goal";
      return;
    }
    const Pose2 next = StepUnicycle(pose, r.control, s.dt, s.caps);
    run.summary.path_length += Distance(pose.Position(), next.Position());
    pose = next;
    state = r.state;
    run.summary.steps = k + 1;
    Finish(run, MinClearance2d(run.tracks, k + 1, pose.Position()));
    if (run.summary.collided) return;
  }
}

void Run3d(const Scenario& s, RunResult& run) {
  const std::size_t horizon = s.EffectiveHorizon();
  State3 st{s.start, (s.goal - s.start).Normalized()};
  PlannerState3d state;
  const std::size_t n = run.tracks.size();
  std::vector<SurfaceSamples> surfaces(n);
  std::vector<std::vector<Vec3>> vel_hist(n);
  std::vector<std::vector<double>> rot_hist(n);
  std::vector<ObstacleView3d> views(n);

  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const ObstacleTrack& t = run.tracks[i];
      surfaces[i] = t.SurfaceAt(k);
      views[i] = {t.id, &surfaces[i], t.centers[std::min(k, t.steps() - 1)], vel_hist[i], rot_hist[i]};
    }
    const StepResult3d r = NavigateStep3d(st, s.goal, views, state, s.planner3d, s.caps, s.dt);
    run.log.records.push_back({static_cast<double>(k) * s.dt,
                               st.position,
                               0.0,
                               r.control.speed,
                               r.control.turn.Norm(),
                               std::string(ToString(r.state.mode)),
                               r.d_min,
                               r.state.mode == NavMode::kObstacleAvoid ? r.state.active_id : -1});
    run.summary.min_clearance = std::min(run.summary.min_clearance, r.d_min);
    if (r.terminal) {
      run.summary.reached = true;
      run.summary.termination = "goal";
      return;
    }
    const State3 next = Step3d(st, r.control, s.dt, s.caps);
    run.summary.path_length += Distance(st.position, next.position);
    st = next;
    state = r.state;
    for (std::size_t i = 0; i < n; ++i) {
      vel_hist[i].push_back(run.tracks[i].VelocityAt(k));
      rot_hist[i].push_back(run.tracks[i].AngularVelocityAt(k));
    }
    run.summary.steps = k + 1;
    Finish(run, MinClearance3d(run.tracks, k + 1, st.position));
    if (run.summary.collided) return;
  }
}

BoundingBox SceneExtent(const Scenario& s, const std::vector<ObstacleTrack>& tracks, double pad) {
  std::vector<Vec2> pts{s.start.Xy(), s.goal.Xy()};
  for (const ObstacleTrack& t : tracks) {
    double reach = 0.0;
    for (const Vec2& v : t.body) reach = std::max(reach, v.Norm());
    double scale = 1.0;
    for (const auto& row : t.scales) {
      for (double sc : row) scale = std::max(scale, sc);
    }
    for (const Vec3& c : t.centers) {
      pts.push_back(c.Xy() - Vec2{reach * scale, reach * scale});
      pts.push_back(c.Xy() + Vec2{reach * scale, reach * scale});
    }
  }
  BoundingBox box = Bounds(pts);
  box.min -= Vec2{pad, pad};
  box.max += Vec2{pad, pad};
  return box;
}

void RunUuv(const Scenario& s, RunResult& run) {
  const std::size_t horizon = s.EffectiveHorizon();
  const Vec2 goal = s.goal.Xy();
  const BoundingBox extent = SceneExtent(s, run.tracks, 1.0);
  const std::size_t n = run.tracks.size();
  std::vector<AmapsGrid> grids;
  for (std::size_t i = 0; i < n; ++i) grids.emplace_back(s.amaps.cell_size, extent, s.amaps.window);
  std::vector<UuvPlannerState> planners(n);
  UuvState uuv{s.start.Xy(), {}};
  std::vector<ObstacleBoundary> boundaries(n);
  int active = -1;

  for (std::size_t k = 0; k < horizon; ++k) {
    double d_min = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      boundaries[i] = run.tracks[i].BoundaryAt(k);
      grids[i].Rasterize(boundaries[i]);
      const double d = DistToObstacle(uuv.position, boundaries[i]).distance;
      if (d < d_min) {
        d_min = d;
        nearest = i;
      }
    }
    UuvStepResult r;
    if (n == 0) {
      static const AmapsGrid kEmpty(s.amaps.cell_size, {{0, 0}, {1, 1}}, 1);
      static const ObstacleBoundary kNone;
      const Vec2 to_goal = goal - uuv.position;
      r.terminal = to_goal.Norm() <= s.amaps.goal_tolerance;
      r.waypoint = r.terminal ? uuv.position : uuv.position + ClampComponents(to_goal, s.caps.v_max * s.dt);
      (void)kEmpty;
      (void)kNone;
    } else {
      // Only the nearest obstacle drives the decision; the others keep their
      // traces reset until they become nearest.
      r = UuvNavigateStep(uuv, goal, grids[nearest], boundaries[nearest], planners[nearest], s.amaps,
                          s.caps, s.dt);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == nearest) {
          planners[i] = r.state;
        } else {
          planners[i].avoiding = false;
          planners[i].trace.Reset();
        }
      }
      active = r.state.avoiding ? run.tracks[nearest].id : -1;
    }
    const Vec2 step = r.waypoint - uuv.position;
    run.log.records.push_back({static_cast<double>(k) * s.dt,
                               {uuv.position.x, uuv.position.y, 0.0},
                               step.SquaredNorm() > 0.0 ? step.Angle() : 0.0,
                               step.Norm() / s.dt,
                               0.0,
                               active >= 0 ? "M2" : "M1",
                               d_min,
                               active});
    run.summary.min_clearance = std::min(run.summary.min_clearance, d_min);
    if (r.terminal) {
      run.summary.reached = true;
      run.summary.termination = "goal";
      return;
    }
    run.summary.path_length += step.Norm();
    uuv.velocity = step / s.dt;
    uuv.position = r.waypoint;
    run.summary.steps = k + 1;
    Finish(run, MinClearance2d(run.tracks, k + 1, uuv.position));
    if (run.summary.collided) return;
  }
}

}  // namespace

RunResult RunSim(const Scenario& s) {
  RunResult run;
  run.log.dimension = s.dimension;
  run.summary.min_clearance = std::numeric_limits<double>::infinity();
  run.summary.termination = "horizon";
  run.tracks = ExpandObstacles(s, EffectiveSeed(s));
  try {
    switch (s.planner) {
      case PlannerKind::kPlanner2d: Run2d(s, run); break;
      case PlannerKind::kPlanner3d: Run3d(s, run); break;
      case PlannerKind::kAmaps: RunUuv(s, run); break;
    }
  } catch (const Error& e) {
    run.summary.termination = "error";
    run.summary.violations.push_back(e.what());
    if (e.code() == ErrorCode::kPInsideObstacle) run.summary.collided = true;
  }
  return run;
}

}  // namespace navkit
