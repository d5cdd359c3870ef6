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

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "navkit/geometry.hpp"
#include "navkit/kinematics.hpp"
#include "navkit/planner2d.hpp"
#include "navkit/vec.hpp"

namespace navkit {

struct CellIndex {
  long ix = 0;
  long iy = 0;
  bool operator==(const CellIndex&) const = default;
};

// Square cells of side cell_size on a global lattice: cell (ix, iy) spans
// [ix * s, (ix + 1) * s) x [iy * s, (iy + 1) * s). Counts record in how many
// of the last `window` observations each cell center was inside the obstacle.
class AmapsGrid {
 public:
  AmapsGrid(double cell_size, const BoundingBox& extent, std::size_t window);

  // Records one observation. Throws kGridTooSmall when the outline leaves the
  // grid extent.
  void Rasterize(const ObstacleBoundary& obs);

  double cell_size() const { return cell_size_; }
  std::size_t window() const { return window_; }
  CellIndex origin_cell() const { return origin_; }
  long nx() const { return nx_; }
  long ny() const { return ny_; }
  std::size_t observations() const { return history_.size(); }

  bool InGrid(const CellIndex& c) const;
  int Count(const CellIndex& c) const;
  Vec2 CellCenter(const CellIndex& c) const;
  CellIndex CellOf(const Vec2& p) const;
  // Cells covered by the most recent observation.
  std::span<const CellIndex> LatestCells() const;
  bool CoveredLatest(const CellIndex& c) const;

  // One line per covered cell: "ix iy count", row-major from the origin.
  void Dump(std::ostream& out) const;

 private:
  std::size_t Flat(const CellIndex& c) const;

  double cell_size_;
  std::size_t window_;
  CellIndex origin_;
  long nx_;
  long ny_;
  std::vector<std::uint16_t> counts_;
  std::vector<std::uint8_t> latest_mask_;
  std::deque<std::vector<CellIndex>> history_;
};

// Center of the nearest latest-covered cell among those holding a boundary
// point visible from pos (occluders may hide parts of the obstacle).
// Throws kNoCoveredCells when nothing qualifies, kPInsideObstacle.
Vec2 NearestAvoidPoint(const Vec2& pos, const AmapsGrid& grid, const ObstacleBoundary& latest,
                       std::span<const ObstacleBoundary> occluders = {});

struct DeformationTrace {
  std::vector<Vec2> r_min_history;  // nearest points since the last reset
  std::size_t count = 0;            // displacements recorded since the last reset

  void Push(const Vec2& r_min);
  void Reset();
};

// Mean step displacement of the recorded nearest points. Throws kEmptyTrace.
double ForecastRadius(const DeformationTrace& trace);

enum class StrategyTag { kApproach, kPlus, kMinus, kEmergency };
std::string_view ToString(StrategyTag tag);

struct AmapsConfig {
  double cell_size = 0.1;       // m
  std::size_t window = 10;      // observations
  double switch_distance = 1.5; // L, m
  double clearance_margin = 0.2;
  double goal_tolerance = 0.1;
  double vision_resolution = kDefaultVisionResolution;
};

struct UuvState {
  Vec2 position;
  Vec2 velocity;  // last displacement / dt
};

struct UuvPlannerState {
  bool avoiding = false;
  AvoidDirection direction = AvoidDirection::kPositive;
  DeformationTrace trace;
};

struct UuvStepResult {
  Vec2 waypoint;
  StrategyTag tag = StrategyTag::kApproach;
  UuvPlannerState state;
  bool terminal = false;
  double d_imin = 0.0;       // distance to the avoid point, +inf when none
  double forecast_radius = 0.0;
};

// Scales a displacement so each component stays within limit (the direction
// is kept).
Vec2 ClampComponents(const Vec2& d, double limit);

// One planning step for the waypoint-driven vehicle. `grid` must already hold
// the current observation of `latest`.
UuvStepResult UuvNavigateStep(const UuvState& state, const Vec2& goal, const AmapsGrid& grid,
                              const ObstacleBoundary& latest, const UuvPlannerState& planner,
                              const AmapsConfig& config, const RobotCaps& caps, double dt);

}  // namespace navkit
