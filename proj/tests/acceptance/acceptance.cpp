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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "navkit/amaps.hpp"
#include "navkit/bpnn.hpp"
#include "navkit/coverage.hpp"
#include "navkit/error.hpp"
#include "navkit/planner2d.hpp"
#include "navkit/planner3d.hpp"
#include "navkit/predictor.hpp"
#include "navkit/sim.hpp"

namespace fs = std::filesystem;
using namespace navkit;

namespace {

const fs::path kScenarios = fs::path(NAVKIT_SOURCE_DIR) / "scenarios";

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void Note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Clearance of every logged position against the obstacles at the same step.
double MinLoggedClearance(const RunResult& run) {
  double best = std::numeric_limits<double>::infinity();
  const auto& rec = run.log.records;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    for (const ObstacleTrack& t : run.tracks) {
      const std::size_t at = std::min(k, t.steps() - 1);
      best = std::min(best, run.log.dimension == 3 ? t.ClearanceAt(at, rec[k].position)
                                                   : t.ClearanceAt(at, rec[k].position.Xy()));
    }
  }
  return best;
}

bool ControlsWithinCaps(const RunResult& run, const RobotCaps& caps) {
  for (const TrajectoryRecord& r : run.log.records) {
    if (r.v < -kControlTolerance || r.v > caps.v_max + kControlTolerance) return false;
    if (std::abs(r.omega) > caps.u_max + kControlTolerance) return false;
  }
  return true;
}

ObstacleMotionTrace TraceOf(const ObstacleTrack& t, double dt, std::size_t steps) {
  ObstacleMotionTrace tr;
  tr.dt = dt;
  for (std::size_t k = 0; k < std::min(steps, t.steps()); ++k) {
    tr.boundaries.push_back(t.BoundaryAt(k));
    tr.velocities.push_back(t.VelocityAt(k).Xy());
    tr.angular_velocities.push_back(t.AngularVelocityAt(k));
  }
  return tr;
}

Outcome Criterion1() {
  Outcome o;
  const Scenario s = LoadScenario(kScenarios / "ch2_single_obstacle.json");
  o.Require(s.start == Vec3(0, 0, 0) && s.goal == Vec3(10, 10, 0), "start/goal");
  o.Require(s.caps.v_max == 0.707 && s.caps.u_max == 1.414, "caps");
  const auto t0 = Clock::now();
  const RunResult run = RunSim(s);
  const double secs = Seconds(t0);
  for (const ObstacleTrack& t : run.tracks) {
    o.Require(CheckMotionConstraints(TraceOf(t, s.dt, run.log.records.size()), s.caps).ok(),
              "obstacle script not compliant");
  }
  const double clearance = MinLoggedClearance(run);
  o.Require(run.summary.reached, "goal not reached");
  o.Require(!run.summary.collided && clearance > 0.0, "clearance " + Num(clearance));
  o.Require(run.summary.path_length <= 16.4, "path length " + Num(run.summary.path_length));
  o.Require(secs < 1.0, "runtime " + Num(secs) + " s");
  o.Note("path " + Num(run.summary.path_length) + " m, clearance " + Num(clearance) + " m, " +
         Num(secs) + " s");
  return o;
}

Outcome Criterion2() {
  Outcome o;
  const Scenario s = LoadScenario(kScenarios / "ch2_six_obstacles.json");
  o.Require(s.obstacles.size() == 6, "obstacle count");
  const RunResult run = RunSim(s);
  o.Require(run.summary.reached, "goal not reached");
  o.Require(!run.summary.collided, "collision");
  o.Require(ControlsWithinCaps(run, s.caps), "control outside caps");

  // Replay the selection rule from the logged poses: the logged target must be
  // the nearest obstacle that is in the way and within the switch distance.
  const Vec2 goal = s.goal.Xy();
  std::size_t avoid_steps = 0, mismatches = 0;
  for (std::size_t k = 0; k < run.log.records.size(); ++k) {
    const TrajectoryRecord& r = run.log.records[k];
    const Vec2 p = r.position.Xy();
    if (Distance(p, goal) <= s.planner2d.goal_tolerance) continue;
    int expected = -1;
    double best = std::numeric_limits<double>::infinity();
    for (const ObstacleTrack& t : run.tracks) {
      const ObstacleBoundary b = t.BoundaryAt(k);
      const double d = DistToObstacle(p, b).distance;
      if (d <= s.planner2d.switch_distance && d < best && InWay(p, goal, b)) {
        best = d;
        expected = t.id;
      }
    }
    avoid_steps += r.obstacle_id >= 0;
    if (r.obstacle_id != expected) ++mismatches;
  }
  o.Require(mismatches == 0, std::to_string(mismatches) + " steps with a different target");
  o.Require(avoid_steps > 0, "avoidance never engaged");
  o.Note(std::to_string(avoid_steps) + " avoidance steps, path " + Num(run.summary.path_length) +
         " m");
  return o;
}

Outcome Criterion3() {
  Outcome o;
  double secs = 0.0;
  int reached = 0, collided = 0, bad_end = 0, noncompliant = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto t0 = Clock::now();
    const Scenario s = RandomScenario2d(seed);
    const RunResult run = RunSim(s);
    secs += Seconds(t0);

    try {
      ValidateScenario(s, run.tracks);
    } catch (const Error&) {
      ++noncompliant;
    }
    // Per-step excursion oracle over the steps actually run, on every tenth
    // scenario (it is the slow part).
    if (seed % 10 == 0) {
      for (const ObstacleTrack& t : run.tracks) {
        if (!CheckMotionConstraints(TraceOf(t, s.dt, run.log.records.size()), s.caps).ok()) {
          ++noncompliant;
        }
      }
    }
    const double clearance = MinLoggedClearance(run);
    if (run.summary.collided || clearance <= 0.0) ++collided;
    if (run.summary.reached) {
      ++reached;
    } else if (run.summary.termination != "horizon") {
      ++bad_end;
    }
  }
  o.Require(noncompliant == 0, std::to_string(noncompliant) + " non-compliant scripts");
  o.Require(collided == 0, std::to_string(collided) + " collisions");
  o.Require(reached >= 190, std::to_string(reached) + "/200 reached");
  o.Require(bad_end == 0, std::to_string(bad_end) + " runs ended before the horizon");
  o.Require(secs < 60.0, "runtime " + Num(secs) + " s");
  o.Note(std::to_string(reached) + "/200 reached, " + Num(secs) + " s generating and running");
  return o;
}

Outcome Criterion4() {
  Outcome o;
  const Scenario s = LoadScenario(kScenarios / "ch3_moving_obstacle.json");
  const RunResult run = RunSim(s);
  o.Require(run.summary.reached, "goal not reached");
  o.Require(!run.summary.collided && MinLoggedClearance(run) > 0.0, "collision");
  for (const ObstacleTrack& t : run.tracks) {
    for (std::size_t k = 0; k < t.steps(); ++k) {
      const double v = t.VelocityAt(k).Norm();
      const double u = std::abs(t.AngularVelocityAt(k));
      if (!(v > 0.0 && v < s.caps.v_max && u < s.caps.u_max)) {
        o.Require(false, "obstacle motion outside limits at step " + std::to_string(k));
        break;
      }
    }
  }

  // Replay the run to see headings and turn vectors, which the log does not hold.
  State3 st{s.start, (s.goal - s.start).Normalized()};
  PlannerState3d ps;
  const std::size_t n = run.tracks.size();
  std::vector<SurfaceSamples> surfaces(n);
  std::vector<std::vector<Vec3>> vel(n);
  std::vector<std::vector<double>> rot(n);
  std::vector<ObstacleView3d> views(n);
  double unit_res = 0.0, orth_res = 0.0;
  bool same_path = true, engaged = false;
  for (std::size_t k = 0; k < run.log.records.size(); ++k) {
    same_path = same_path && run.log.records[k].position == st.position;
    for (std::size_t i = 0; i < n; ++i) {
      const ObstacleTrack& t = run.tracks[i];
      surfaces[i] = t.SurfaceAt(k);
      views[i] = {t.id, &surfaces[i], t.centers[std::min(k, t.steps() - 1)], vel[i], rot[i]};
    }
    const StepResult3d r = NavigateStep3d(st, s.goal, views, ps, s.planner3d, s.caps, s.dt);
    unit_res = std::max(unit_res, std::abs(st.heading.Norm() - 1.0));
    if (r.terminal) break;
    orth_res = std::max(orth_res, std::abs(Dot(r.control.turn, st.heading)));
    o.Require(WithinCaps(r.control, st.heading, s.caps), "control outside caps at step " + std::to_string(k));
    engaged = engaged || r.state.mode == NavMode::kObstacleAvoid;
    st = Step3d(st, r.control, s.dt, s.caps);
    ps = r.state;
    for (std::size_t i = 0; i < n; ++i) {
      vel[i].push_back(run.tracks[i].VelocityAt(k));
      rot[i].push_back(run.tracks[i].AngularVelocityAt(k));
    }
  }
  o.Require(same_path, "replay diverged from the logged run");
  o.Require(engaged, "avoidance never engaged");
  o.Require(unit_res < 1e-9, "heading norm residual " + Num(unit_res));
  o.Require(orth_res < 1e-9, "turn orthogonality residual " + Num(orth_res));

  const std::vector<Vec3> history(20, Vec3{0.5, 0.5, 0.0});
  const Vec3 pred = PredictObstacleVelocity(history, s.planner3d.ar);
  o.Require(pred == Vec3(0.5, 0.5, 0.0), "AR prediction " + Num(pred.x) + "," + Num(pred.y) + "," +
                                             Num(pred.z));
  o.Note("heading residual " + Num(unit_res) + ", orthogonality " + Num(orth_res) +
         ", prediction exact");
  return o;
}

Outcome Criterion5() {
  Outcome o;
  std::vector<double> ar2{1.0, 0.5};
  while (ar2.size() < 50) ar2.push_back(0.6 * ar2[ar2.size() - 1] + 0.3 * ar2[ar2.size() - 2]);
  const ArModel m = FitAr(ar2, 4);
  const bool recovered = m.order == 2 && std::abs(m.coefficients[0] - 0.6) < 1e-6 &&
                         std::abs(m.coefficients[1] - 0.3) < 1e-6;
  o.Require(recovered, "AR(2) not recovered (order " + std::to_string(m.order) + ")");

  std::vector<double> ramp(20);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const ArModel rm = FitAr(ramp, 2);
  const double next = PredictNext(rm, ramp);
  o.Require(std::abs(next - 20.0) < 1e-6, "ramp continuation " + Num(next));

  // Normal equations on noisy AR series of every order.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.1);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x{0.0, 0.0, 0.0};
    for (int t = 0; t < 80; ++t) {
      const std::size_t n = x.size();
      x.push_back(0.2 + 0.5 * x[n - 1] - 0.2 * x[n - 2] + 0.1 * x[n - 3] + noise(rng));
    }
    const ArModel fit = FitAr(x, 4);
    worst = std::max(worst, NormalEquationResidual(x, fit, 4));
  }
  o.Require(worst < 1e-8, "normal-equation residual " + Num(worst));
  o.Note("coefficients " + Num(m.coefficients[0]) + ", " + Num(m.coefficients[1]) +
         "; residual " + Num(worst));
  return o;
}

Outcome Criterion6() {
  Outcome o;
  const Scenario s = LoadScenario(kScenarios / "ch4_uuv_deforming.json");
  o.Require(s.start == Vec3(0, 0, 0) && s.goal == Vec3(10, 10, 0), "start/goal");
  const RunResult run = RunSim(s);
  double worst_rate = 0.0;
  for (const ObstacleTrack& t : run.tracks) {
    for (std::size_t k = 0; k + 1 < t.scales.size(); ++k) {
      for (std::size_t i = 0; i < t.scales[k].size(); ++i) {
        worst_rate = std::max(worst_rate, std::abs(t.scales[k + 1][i] / t.scales[k][i] - 1.0));
      }
    }
  }
  o.Require(worst_rate > 0.0, "obstacle does not deform");
  o.Require(worst_rate <= 0.1, "deformation rate " + Num(worst_rate));
  const double clearance = MinLoggedClearance(run);
  o.Require(run.summary.reached, "goal not reached");
  o.Require(!run.summary.collided && clearance > 0.0, "clearance " + Num(clearance));
  const auto& rec = run.log.records;
  for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
    const Vec2 d = rec[k + 1].position.Xy() - rec[k].position.Xy();
    if (d.Norm() > std::sqrt(2.0) * s.caps.v_max * s.dt + 1e-9) {
      o.Require(false, "step reach exceeded at " + std::to_string(k));
      break;
    }
  }

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> len(1, 40);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    DeformationTrace tr;
    Vec2 p{u(rng) * 5, u(rng) * 5};
    tr.Push(p);
    const int steps = len(rng);
    for (int i = 0; i < steps; ++i) {
      p += Vec2{u(rng), u(rng)} * 0.3;
      tr.Push(p);
    }
    long double sum = 0.0L;
    for (std::size_t i = 1; i < tr.r_min_history.size(); ++i) {
      const long double dx = tr.r_min_history[i].x - tr.r_min_history[i - 1].x;
      const long double dy = tr.r_min_history[i].y - tr.r_min_history[i - 1].y;
      sum += std::sqrt(dx * dx + dy * dy);
    }
    const double oracle = static_cast<double>(sum / static_cast<long double>(tr.count));
    worst = std::max(worst, std::abs(ForecastRadius(tr) - oracle));
  }
  o.Require(worst <= 1e-12, "forecast radius off by " + Num(worst));
  o.Note("path " + Num(run.summary.path_length) + " m, clearance " + Num(clearance) +
         " m, max deformation " + Num(worst_rate) + ", radius error " + Num(worst));
  return o;
}

// Largest relative disagreement between backprop and central differences.
double GradientCheck(const std::vector<int>& sizes, std::uint64_t seed) {
  Mlp net = MakeMlp(sizes, seed);
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& b : net.biases) {
    for (double& x : b) x = 0.5 * u(rng);
  }
  std::vector<double> in(static_cast<std::size_t>(sizes.front())), target(static_cast<std::size_t>(sizes.back()));
  for (double& x : in) x = 2.0 * u(rng);
  for (double& x : target) x = u(rng);
  const Gradients g = BackpropGradients(net, in, target);
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + h;
    const double up = SampleMse(net, in, target);
    param = keep - h;
    const double down = SampleMse(net, in, target);
    param = keep;
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max(std::abs(fd), std::abs(analytic));
    // Entries this small are below the round-off of the difference quotient.
    if (scale < 1e-8) return;
    worst = std::max(worst, std::abs(fd - analytic) / scale);
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].size(); ++i) check(net.weights[l][i], g.weights[l][i]);
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) check(net.biases[l][i], g.biases[l][i]);
  }
  return worst;
}

double BandWidth(const Mlp& net, const Dataset& held) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Sample& s : held.samples) {
    const double e = s.d_min - Forward(net, s.readings)[0];
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return hi - lo;
}

Outcome Criterion7() {
  Outcome o;
  double grad = 0.0;
  std::size_t params = 0;
  const std::vector<std::vector<int>> shapes{{9, 12, 2}, {9, 100, 100, 2}, {5, 7, 3, 4}};
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    grad = std::max(grad, GradientCheck(shapes[i], 40 + i));
    params += ZeroMlp(shapes[i]).ParameterCount();
  }
  o.Require(grad < 1e-4, "gradient relative error " + Num(grad));

  // Linear target on i.i.d. readings against the least-squares fit.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> wdist(0.0, 0.2), box(0.5, 2.5);
  Readings w{};
  for (double& x : w) x = wdist(rng);
  auto make = [&](std::size_t n) {
    Dataset d;
    for (std::size_t k = 0; k < n; ++k) {
      Sample s;
      s.d_min = 0.0;
      for (int i = 0; i < kSensorCount; ++i) {
        s.readings[i] = box(rng);
        s.d_min += w[i] * s.readings[i];
      }
      s.index = 1;
      d.samples.push_back(s);
    }
    return d;
  };
  const Dataset train = make(500);
  const Dataset held = make(200);
  Eigen::MatrixXd a(train.samples.size(), kSensorCount + 1);
  Eigen::VectorXd y(train.samples.size());
  for (std::size_t r = 0; r < train.samples.size(); ++r) {
    for (int i = 0; i < kSensorCount; ++i) a(r, i) = train.samples[r].readings[i];
    a(r, kSensorCount) = 1.0;
    y(r) = train.samples[r].d_min;
  }
  const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);
  TrainConfig cfg;
  cfg.seed = 1;
  cfg.learning_rate = 0.003;
  cfg.max_epochs = 20000;
  cfg.patience = 1000;
  const TrainResult lin = Train(MakeMlp({9, 12, 2}, 1), train, cfg);
  double lin_worst = 0.0;
  for (const Sample& s : held.samples) {
    double ls = beta(kSensorCount);
    for (int i = 0; i < kSensorCount; ++i) ls += beta(i) * s.readings[i];
    lin_worst = std::max(lin_worst, std::abs(Forward(lin.net, s.readings)[0] - ls));
  }
  o.Require(lin_worst < 0.01, "linear target off least squares by " + Num(lin_worst));

  // Band width on a common held-out set, averaged over training seeds.
  const Dataset held_scenes = SynthDataset(SceneConfig{}, 500, 99);
  auto mean_band = [&](std::size_t groups) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Dataset d = SynthDataset(SceneConfig{}, groups, 1000 + seed);
      TrainConfig c;
      c.seed = seed;
      sum += BandWidth(Train(MakeMlp({9, 12, 2}, seed), d, c).net, held_scenes);
    }
    return sum / 5.0;
  };
  const double band50 = mean_band(50);
  const double band150 = mean_band(150);
  o.Require(band150 < band50, "band did not narrow: " + Num(band150) + " vs " + Num(band50));
  o.Require(band150 <= 1.0, "band at 150 groups " + Num(band150));
  o.Note("gradient rel err " + Num(grad) + " over " + std::to_string(params) +
         " parameters; linear " + Num(lin_worst) + "; band 50 " + Num(band50) + " m, 150 " +
         Num(band150) + " m");
  return o;
}

Region Square(double side) {
  Region r;
  r.polygon.vertices = {{0, 0}, {side, 0}, {side, side}, {0, side}};
  r.polygon.mass_center = {side / 2, side / 2};
  return r;
}

Outcome Criterion8() {
  Outcome o;
  const Region region = Square(600.0);
  const FovSpec fov;  // theta = pi/2
  const double radius = 60.0;
  const auto t0 = Clock::now();
  TriangulationOptions opts;
  opts.prune_step = 1.0;
  const WaypointSet ws = TriangulateRegion(region, radius, fov, 0.0, 0.0, 0.0, opts);

  // Independent oracle: every integer grid point of the square against every disc.
  const double r2 = radius * radius;
  std::vector<int> hits;
  std::vector<int> sole;  // waypoint that alone sees a point, -1 otherwise
  std::size_t uncovered = 0;
  std::vector<bool> necessary(ws.points.size(), false);
  for (int gx = 0; gx <= 600; ++gx) {
    for (int gy = 0; gy <= 600; ++gy) {
      int count = 0, who = -1;
      for (std::size_t i = 0; i < ws.points.size(); ++i) {
        const double dx = gx - ws.points[i].x;
        const double dy = gy - ws.points[i].y;
        if (dx * dx + dy * dy <= r2) {
          ++count;
          who = static_cast<int>(i);
        }
      }
      if (count == 0) ++uncovered;
      if (count == 1) necessary[static_cast<std::size_t>(who)] = true;
    }
  }
  const std::size_t redundant =
      static_cast<std::size_t>(std::count(necessary.begin(), necessary.end(), false));
  const double secs = Seconds(t0);

  const double z = ws.points.front().z;
  double z_dev = 0.0;
  for (const Vec3& p : ws.points) z_dev = std::max(z_dev, std::abs(p.z - 60.0));
  o.Require(z_dev < 1e-9, "altitude off 60 by " + Num(z_dev));
  o.Require(uncovered == 0, std::to_string(uncovered) + " uncovered grid points");
  o.Require(redundant == 0, std::to_string(redundant) + " waypoints removable without a gap");
  o.Require(CheckFullCoverage(ws, region, 1.0).full, "library coverage check disagrees");
  const double side = TriangleSide(radius);
  o.Require(std::abs(side / std::sqrt(3.0) - radius) < 1e-12 && ws.side == side,
            "circumradius identity");
  o.Require(secs < 5.0, "runtime " + Num(secs) + " s");
  o.Note(std::to_string(ws.points.size()) + " waypoints at z=" + Num(z) + ", all necessary, " +
         Num(secs) + " s");
  return o;
}

double BruteForceTour(std::span<const Vec3> pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      len += Distance(pts[order[i]], pts[order[(i + 1) % order.size()]]);
    }
    best = std::min(best, len);
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return best;
}

Outcome Criterion9() {
  Outcome o;
  TriangulationOptions opts;
  opts.prune_step = 1.0;
  double worst_ratio = 0.0;
  std::size_t tours = 0;
  for (int l = 0; l < 3; ++l) {
    const WaypointSet ws =
        TriangulateRegion(Square(600.0), 60.0, FovSpec{}, l * 0.3, l * 11.0, l * 5.0, opts);
    for (int k = 8; k <= 20; k += 4) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        for (const auto& c : ClusterWaypoints(ws.points, k, seed)) {
          if (c.size() < 3 || c.size() > 8) continue;
          std::vector<Vec3> sub;
          for (std::size_t i : c) sub.push_back(ws.points[i]);
          const double opt = BruteForceTour(sub);
          for (const Vec3& start : sub) {
            const auto order = SpiralAlternatingTour(sub, start, ws.side);
            worst_ratio = std::max(worst_ratio, ClosedTourLength(sub, order) / opt);
            ++tours;
          }
        }
      }
    }
  }
  o.Require(tours > 0, "no clusters of size 3..8");
  o.Require(worst_ratio <= 1.5, "tour ratio " + Num(worst_ratio));

  double c1 = 0.0, c0 = 0.0, visit = 0.0;
  int regions = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios / "regions")) {
    if (entry.path().extension() != ".json") continue;
    const CoverageTask task = LoadCoverageTask(entry.path().string());
    const CoveragePlan plan = PlanCoverage(task);
    ++regions;
    const std::string name = entry.path().filename().string();
    o.Require(plan.coverage.full, name + " not fully covered");
    o.Require(plan.margins.has_value() && plan.margins->ok(), name + " margins");
    o.Require(plan.path.has_value(), name + " has no path");
    if (!plan.path) continue;
    const JoinResiduals jr = JoinResidualsOf(*plan.path);
    c1 = std::max(c1, jr.c1);
    c0 = std::max(c0, jr.c0);
    for (std::size_t i = 0; i < plan.order.size(); ++i) {
      const double d = Distance(plan.path->visit_points[i], plan.waypoints.points[plan.order[i]]);
      visit = std::max(visit, d - plan.delta);
    }
  }
  o.Require(regions >= 2, "bundled regions missing");
  o.Require(c1 < 1e-6 && c0 < 1e-6, "join residuals " + Num(c0) + ", " + Num(c1));
  o.Require(visit <= 1e-9, "visit point beyond delta by " + Num(visit));
  o.Note("worst tour ratio " + Num(worst_ratio) + " over " + std::to_string(tours) +
         " tours; C1 residual " + Num(c1) + "; " + std::to_string(regions) + " regions");
  return o;
}

std::string RunCsv(const fs::path& p) {
  const RunResult run = RunSim(LoadScenario(p));
  std::ostringstream out;
  WriteCsv(run.log, out);
  return out.str();
}

std::string PlanCsv(const fs::path& p) {
  const CoveragePlan plan = PlanCoverage(LoadCoverageTask(p.string()));
  std::ostringstream out;
  WriteWaypointsCsv(plan.waypoints, out);
  if (plan.path) WritePathCsv(*plan.path, 0.05, out);
  return out.str();
}

Outcome Criterion10() {
  Outcome o;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    const std::string a = RunCsv(p);
    const std::string b = RunCsv(p);
    o.Require(!a.empty() && a == b, p.filename().string() + " differs between runs");
  }
  std::size_t regions = 0;
  for (const auto& e : fs::directory_iterator(kScenarios / "regions")) {
    if (e.path().extension() != ".json") continue;
    ++regions;
    o.Require(PlanCsv(e.path()) == PlanCsv(e.path()), e.path().filename().string() + " differs");
  }
  o.Require(files.size() >= 5, "bundled scenarios missing");
  o.Note(std::to_string(files.size()) + " scenarios and " + std::to_string(regions) +
         " regions reproduced byte for byte");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{
      Criterion1, Criterion2, Criterion3, Criterion4, Criterion5,
      Criterion6, Criterion7, Criterion8, Criterion9, Criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
