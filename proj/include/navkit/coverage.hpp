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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "navkit/geometry.hpp"
#include "navkit/vec.hpp"

namespace navkit {

// Ground elevation on a regular grid, bilinear between nodes.
struct Heightmap {
  Vec2 origin;
  double spacing = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, ny rows of nx

  double At(const Vec2& p) const;  // clamped to the grid edge
  Vec2 Max() const { return {origin.x + spacing * (nx - 1), origin.y + spacing * (ny - 1)}; }
};

struct Region {
  ObstacleBoundary polygon;
  std::optional<Heightmap> heightmap;

  double GroundAt(const Vec2& p) const { return heightmap ? heightmap->At(p) : 0.0; }
};

// Throws kInvalidArgument for a self-intersecting or degenerate outline or a
// heightmap that does not span the outline's bounding box.
void ValidateRegion(const Region& region);

struct FovSpec {
  double theta = kPi / 2.0;  // full apex angle of the downward camera cone
  double z_min = 0.0;
  double z_max = std::numeric_limits<double>::infinity();
};

struct Altitude {
  double z = 0.0;
  double radius = 0.0;  // ground footprint radius at z
  bool clipped = false;
};

// z = R / tan(theta / 2), clipped into [z_min, z_max]; when clipped the radius
// is recomputed from the clipped altitude.
Altitude AltitudeForRadius(double radius, const FovSpec& fov);

inline double TriangleSide(double radius) { return std::sqrt(3.0) * radius; }

enum class Placement {
  kVertices,       // lattice vertices; each triangle is covered by its three corners
  kCircumcenters,  // one waypoint per triangle center
};

struct TriangulationOptions {
  Placement placement = Placement::kVertices;
  // > 0: drop waypoints whose samples on this grid (see CheckFullCoverage) are
  // all seen by another waypoint, fewest-samples first. 0 keeps every waypoint
  // whose Voronoi cell meets the region, which covers the region exactly.
  double prune_step = 0.0;
};

struct WaypointSet {
  std::vector<Vec3> points;
  double coverage_radius = 0.0;
  double side = 0.0;
  double lambda = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  bool altitude_clipped = false;
};

// Equilateral lattice of side sqrt(3) * R rotated by lambda with a vertex at
// (x0, y0). R is the footprint radius after altitude clipping. Throws
// kEmptyRegion when no waypoint is needed, kInvalidArgument for R <= 0 or
// lambda outside [0, pi/3).
WaypointSet TriangulateRegion(const Region& region, double radius, const FovSpec& fov,
                              double lambda, double x0, double y0,
                              const TriangulationOptions& opts = {});

// Second stage over terrain: each waypoint keeps its planar position and
// rises to R / tan(theta / 2) above the highest ground within R of it
// (sampled every `step`), clipped to z_max. No-op without a heightmap.
void RaiseOverTerrain(WaypointSet& ws, const Region& region, const FovSpec& fov, double step);

struct SearchResult {
  WaypointSet best;
  std::size_t evaluated = 0;
};

// Grid search over lambda (16 steps in [0, pi/3)) and the anchor within one
// lattice period (R/4 steps); fewest waypoints wins, first found on ties.
SearchResult MinimalWaypointSearch(const Region& region, double radius, const FovSpec& fov,
                                   const TriangulationOptions& opts = {});

struct CoverageReport {
  bool full = false;
  std::size_t samples = 0;
  std::vector<Vec2> uncovered;
};

// Samples at bbox.min + (i, j) * step that lie in the region (edges included).
std::vector<Vec2> RegionSamples(const Region& region, double step);

// Planar disc test of every sample against the waypoints' coverage radius.
CoverageReport CheckFullCoverage(const WaypointSet& ws, const Region& region, double step);

// Cone visibility over the terrain: a ground sample is seen when it lies in
// some waypoint's cone and the sight line clears the heightmap, sampled every
// 1 m. Same as CheckFullCoverage without a heightmap.
CoverageReport CheckTerrainCoverage(const WaypointSet& ws, const Region& region,
                                    const FovSpec& fov, double step);

// Seeded k-means++ then Lloyd iterations on x, y. Clusters hold indices into
// `points`, ascending, and are ordered by their smallest index. Throws
// kKTooLarge for k > n, kInvalidArgument for k < 1.
std::vector<std::vector<std::size_t>> ClusterWaypoints(std::span<const Vec3> points, int k,
                                                       std::uint64_t seed);

// Visiting order (indices into `points`) by rings of `ring_width` around the
// planar centroid, outermost ring first, sweeping by bearing. Each ring
// reverses the previous ring's direction and starts next to where it ended.
// The outer ring's first member and direction are those giving the shortest
// closed cycle; the cycle is then entered at the member nearest `start`.
std::vector<std::size_t> SpiralAlternatingTour(std::span<const Vec3> points, const Vec3& start,
                                               double ring_width);

// Cluster tours chained greedily from the cluster nearest `start`; each
// cluster is entered next to the previous cluster's last point.
std::vector<std::size_t> ClusteredTour(std::span<const Vec3> points,
                                       const std::vector<std::vector<std::size_t>>& clusters,
                                       const Vec3& start, double ring_width);

double ClosedTourLength(std::span<const Vec3> points, std::span<const std::size_t> order);

struct Bezier {
  Vec3 b0, b1, b2, b3;

  Vec3 At(double t) const;
  Vec3 Derivative(double t) const;
  Vec3 SecondDerivative(double t) const;
};

struct SmoothPath {
  std::vector<Bezier> segments;
  std::vector<Vec3> visit_points;  // segment i starts at visit_points[i]
  bool closed = true;
};

// Closed loop through visit points p*_i within delta of p_i, each moved
// toward the chord of its neighbours. The tangent at a visit point bisects
// the unit legs and is shared by both segments. Each segment's two handle
// lengths start at a third of the leg and are hill-climbed (at most 20
// rounds) until the sampled radius of curvature reaches min_turn_radius.
// Throws kInvalidArgument for fewer than two points or delta < 0,
// kCoincidentPoints for repeated consecutive visit points, and
// kInfeasibleCurvature when the climb stalls short of the radius.
SmoothPath SmoothTour(std::span<const Vec3> ordered, double delta, double min_turn_radius);

double PathLength(const SmoothPath& path, int samples_per_segment = 256);
double MinTurnRadius(const Bezier& b, int samples = 200);

struct JoinResiduals {
  double c0 = 0.0;  // largest endpoint gap
  double c1 = 0.0;  // largest difference of unit tangents
};
JoinResiduals JoinResidualsOf(const SmoothPath& path);

struct MarginViolation {
  std::string kind;  // "separation", "clearance" or "side-condition"
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
  double limit = 0.0;
};

struct MarginReport {
  std::vector<MarginViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Pairwise waypoint separation >= c1 and clearance above the terrain >= c2,
// with the side conditions c1 > 2 delta > 0 and c2 > delta > 0.
MarginReport CheckSafetyMargins(const WaypointSet& ws, const Region& region, double delta,
                                double c1, double c2);

// Region outline, footprint discs, waypoints and (when given) the smoothed
// path, in plan view.
void RenderCoverageSvg(const Region& region, const WaypointSet& ws, const SmoothPath* path,
                       std::ostream& out);

void WriteWaypointsCsv(const WaypointSet& ws, std::ostream& out);
// Sampled at `step` in the global parameter (segment index + local t).
void WritePathCsv(const SmoothPath& path, double step, std::ostream& out);

struct CoverageTask {
  Region region;
  FovSpec fov;
  double radius = 0.0;
  std::optional<double> lambda;  // absent: minimal-waypoint search
  double x0 = 0.0;
  double y0 = 0.0;
  std::optional<double> delta;  // default 0.25 R
  double min_turn_radius = 0.0;
  double c1 = 0.0;  // 0: margins not checked
  double c2 = 0.0;
  int clusters = 1;
  std::uint64_t seed = 0;
};

// JSON region file: "polygon", optional "heightmap" {origin, spacing, nx, ny,
// values}, and optional task fields. Throws kParseError.
CoverageTask ParseCoverageTask(const std::string& json_text);
CoverageTask LoadCoverageTask(const std::string& path);

struct PlanSettings {
  double sample_step = 1.0;  // pruning and coverage-check grid
  bool search = false;       // minimal-waypoint search even when lambda is set
};

struct CoveragePlan {
  WaypointSet waypoints;
  CoverageReport coverage;
  double delta = 0.0;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> order;  // visiting order, indices into waypoints.points
  std::optional<SmoothPath> path;  // absent for a single waypoint
  std::optional<MarginReport> margins;  // present when c1 or c2 is set
  bool ok() const { return coverage.full && (!margins || margins->ok()); }
};

// Full pipeline: triangulation (or search), terrain raise, coverage check,
// clustering, touring, smoothing and the margin check.
CoveragePlan PlanCoverage(const CoverageTask& task, const PlanSettings& settings = {});

}  // namespace navkit
