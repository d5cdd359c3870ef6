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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"
#include "json.hpp"
#include "navkit/coverage.hpp"
#include "navkit/error.hpp"

namespace navkit::cli {

namespace fs = std::filesystem;

namespace {

struct PlanOptions {
  std::string region;
  std::optional<double> theta;
  std::optional<double> radius;
  std::optional<int> clusters;
  std::optional<double> delta;
  std::optional<double> lambda;
  std::optional<double> min_turn_radius;
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<std::uint64_t> seed;
  double sample_step = 1.0;
  double path_step = 0.05;
  bool search = false;
  bool svg = false;
  std::string out_dir = "out";
};

std::ofstream OpenOut(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  return out;
}

int Plan(const PlanOptions& o) {
  CoverageTask task = LoadCoverageTask(o.region);
  if (o.theta) task.fov.theta = *o.theta;
  if (o.radius) task.radius = *o.radius;
  if (o.clusters) task.clusters = *o.clusters;
  if (o.delta) task.delta = *o.delta;
  if (o.lambda) task.lambda = *o.lambda;
  if (o.min_turn_radius) task.min_turn_radius = *o.min_turn_radius;
  if (o.c1) task.c1 = *o.c1;
  if (o.c2) task.c2 = *o.c2;
  if (o.seed) task.seed = *o.seed;
  if (!(task.radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "a positive --radius is required");

  const CoveragePlan plan = PlanCoverage(task, {o.sample_step, o.search});
  const WaypointSet& ws = plan.waypoints;
  const CoverageReport& cov = plan.coverage;

  nlohmann::json report;
  report["waypoints"] = ws.points.size();
  report["altitude"] = ws.points.front().z;
  report["coverage_radius"] = ws.coverage_radius;
  report["altitude_clipped"] = ws.altitude_clipped;
  report["lambda"] = ws.lambda;
  report["anchor"] = {ws.x0, ws.y0};
  report["samples"] = cov.samples;
  report["uncovered"] = cov.uncovered.size();
  report["full_coverage"] = cov.full;
  report["clusters"] = plan.clusters.size();
  report["tour_length"] = ClosedTourLength(ws.points, plan.order);
  report["delta"] = plan.delta;

  fs::create_directories(o.out_dir);
  {
    auto out = OpenOut(fs::path(o.out_dir) / "waypoints.csv");
    WriteWaypointsCsv(ws, out);
  }
  if (plan.path) {
    const JoinResiduals jr = JoinResidualsOf(*plan.path);
    report["smoothed_length"] = PathLength(*plan.path);
    report["c1_residual"] = jr.c1;
    auto out = OpenOut(fs::path(o.out_dir) / "path.csv");
    WritePathCsv(*plan.path, o.path_step, out);
  }
  if (plan.margins) {
    report["margins_ok"] = plan.margins->ok();
    report["margin_violations"] = plan.margins->violations.size();
    for (const MarginViolation& v : plan.margins->violations) {
      std::cerr << "margin " << v.kind << " " << v.i << " " << v.j << ": " << v.value << " < "
                << v.limit << '\n';
    }
  }
  if (o.svg) {
    auto out = OpenOut(fs::path(o.out_dir) / "coverage.svg");
    RenderCoverageSvg(task.region, ws, plan.path ? &*plan.path : nullptr, out);
  }
  std::cout << report.dump(2) << '\n';
  return plan.ok() ? kExitOk : kExitFailedRun;
}

}  // namespace

void AddCoverageCommands(CLI::App& app, int& exit_code) {
  auto* cov = app.add_subcommand("coverage", "UAV survey planning");
  cov->require_subcommand(1);
  auto* plan = cov->add_subcommand("plan", "Waypoints, coverage check, tour and smoothed path");
  auto o = std::make_shared<PlanOptions>();
  plan->add_option("region", o->region, "Region JSON file")->required();
  plan->add_option("--fov-theta", o->theta, "Camera apex angle, rad");
  plan->add_option("--radius", o->radius, "Ground footprint radius, m");
  plan->add_option("--clusters", o->clusters, "Number of waypoint clusters")->check(CLI::PositiveNumber);
  plan->add_option("--delta", o->delta, "Visit neighbourhood radius, m (default 0.25 R)");
  plan->add_option("--lambda", o->lambda, "Lattice rotation in [0, pi/3)");
  plan->add_option("--min-turn-radius", o->min_turn_radius, "Smallest turn radius of the path, m");
  plan->add_option("--c1", o->c1, "Minimum waypoint separation, m");
  plan->add_option("--c2", o->c2, "Minimum terrain clearance, m");
  plan->add_option("--seed", o->seed, "Clustering seed");
  plan->add_option("--sample-step", o->sample_step, "Coverage grid step, m")->capture_default_str();
  plan->add_option("--path-step", o->path_step, "Path export parameter step")->capture_default_str();
  plan->add_flag("--search", o->search, "Search lattice rotation and anchor for fewest waypoints");
  plan->add_flag("--svg", o->svg, "Also write coverage.svg");
  plan->add_option("--out", o->out_dir, "Output directory")->capture_default_str();
  plan->callback([o, &exit_code] { exit_code = Plan(*o); });
}

}  // namespace navkit::cli
