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

#include "navkit/amaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "navkit/error.hpp"
#include "navkit/kernels/kernels.hpp"

namespace navkit {

AmapsGrid::AmapsGrid(double cell_size, const BoundingBox& extent, std::size_t window)
    : cell_size_(cell_size), window_(window) {
  if (!(cell_size > 0.0) || window == 0) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs cell_size > 0 and window >= 1");
  }
  origin_ = {static_cast<long>(std::floor(extent.min.x / cell_size)),
             static_cast<long>(std::floor(extent.min.y / cell_size))};
  nx_ = static_cast<long>(std::floor(extent.max.x / cell_size)) - origin_.ix + 1;
  ny_ = static_cast<long>(std::floor(extent.max.y / cell_size)) - origin_.iy + 1;
  if (nx_ <= 0 || ny_ <= 0) throw Error(ErrorCode::kInvalidArgument, "empty grid extent");
  counts_.assign(static_cast<std::size_t>(nx_ * ny_), 0);
  latest_mask_.assign(counts_.size(), 0);
}

bool AmapsGrid::InGrid(const CellIndex& c) const {
  return c.ix >= origin_.ix && c.iy >= origin_.iy && c.ix < origin_.ix + nx_ &&
         c.iy < origin_.iy + ny_;
}

std::size_t AmapsGrid::Flat(const CellIndex& c) const {
  return static_cast<std::size_t>((c.iy - origin_.iy) * nx_ + (c.ix - origin_.ix));
}

int AmapsGrid::Count(const CellIndex& c) const { return InGrid(c) ? counts_[Flat(c)] : 0; }

bool AmapsGrid::CoveredLatest(const CellIndex& c) const {
  return InGrid(c) && latest_mask_[Flat(c)] != 0;
}

Vec2 AmapsGrid::CellCenter(const CellIndex& c) const {
  return {(static_cast<double>(c.ix) + 0.5) * cell_size_, (static_cast<double>(c.iy) + 0.5) * cell_size_};
}

CellIndex AmapsGrid::CellOf(const Vec2& p) const {
  return {static_cast<long>(std::floor(p.x / cell_size_)), static_cast<long>(std::floor(p.y / cell_size_))};
}

std::span<const CellIndex> AmapsGrid::LatestCells() const {
  if (history_.empty()) return {};
  return history_.back();
}

void AmapsGrid::Rasterize(const ObstacleBoundary& obs) {
  const BoundingBox box = Bounds(obs.vertices);
  const CellIndex lo = CellOf(box.min);
  const CellIndex hi = CellOf(box.max);
  if (!InGrid(lo) || !InGrid(hi)) {
    throw Error(ErrorCode::kGridTooSmall, "obstacle outline leaves the grid extent");
  }
  const std::size_t cols = static_cast<std::size_t>(hi.ix - lo.ix + 1);
  const std::size_t rows = static_cast<std::size_t>(hi.iy - lo.iy + 1);
  std::vector<double> px(cols * rows);
  std::vector<double> py(cols * rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Vec2 center = CellCenter({lo.ix + static_cast<long>(c), lo.iy + static_cast<long>(r)});
      px[r * cols + c] = center.x;
      py[r * cols + c] = center.y;
    }
  }
  std::vector<double> polyx;
  std::vector<double> polyy;
  for (const Vec2& v : obs.vertices) {
    polyx.push_back(v.x);
    polyy.push_back(v.y);
  }
  std::vector<std::uint8_t> inside(px.size());
  kernels::Active().points_in_polygon(px.data(), py.data(), px.size(), polyx.data(), polyy.data(),
                                      polyx.size(), inside.data());

  for (const CellIndex& c : LatestCells()) latest_mask_[Flat(c)] = 0;
  std::vector<CellIndex> covered;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    if (!inside[i]) continue;
    const CellIndex c{lo.ix + static_cast<long>(i % cols), lo.iy + static_cast<long>(i / cols)};
    covered.push_back(c);
    ++counts_[Flat(c)];
    latest_mask_[Flat(c)] = 1;
  }
  history_.push_back(std::move(covered));
  if (history_.size() > window_) {
    for (const CellIndex& c : history_.front()) --counts_[Flat(c)];
    history_.pop_front();
  }
}

void AmapsGrid::Dump(std::ostream& out) const {
  for (long r = 0; r < ny_; ++r) {
    for (long c = 0; c < nx_; ++c) {
      const CellIndex cell{origin_.ix + c, origin_.iy + r};
      if (const int n = counts_[Flat(cell)]; n > 0) {
        out << cell.ix << ' ' << cell.iy << ' ' << n << '\n';
      }
    }
  }
}

Vec2 NearestAvoidPoint(const Vec2& pos, const AmapsGrid& grid, const ObstacleBoundary& latest,
                       std::span<const ObstacleBoundary> occluders) {
  const VisionSlice slice = VisibleBoundary(pos, latest, kDefaultVisionResolution, occluders);
  std::optional<CellIndex> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Vec2& p : slice.points) {
    // Covered cell closest to this visible boundary point.
    const CellIndex home = grid.CellOf(p);
    std::optional<CellIndex> local;
    double local_d = std::numeric_limits<double>::infinity();
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const CellIndex c{home.ix + dx, home.iy + dy};
        if (!grid.CoveredLatest(c)) continue;
        const double d = Distance(grid.CellCenter(c), p);
        if (d < local_d) {
          local_d = d;
          local = c;
        }
      }
    }
    if (!local) continue;
    const double d = Distance(grid.CellCenter(*local), pos);
    if (d < best_d) {
      best_d = d;
      best = local;
    }
  }
  if (!best) throw Error(ErrorCode::kNoCoveredCells, "no visible covered cell");
  return grid.CellCenter(*best);
}

void DeformationTrace::Push(const Vec2& r_min) {
  if (!r_min_history.empty()) ++count;
  r_min_history.push_back(r_min);
}

void DeformationTrace::Reset() {
  r_min_history.clear();
  count = 0;
}

double ForecastRadius(const DeformationTrace& trace) {
  if (trace.count == 0 || trace.r_min_history.size() < trace.count + 1) {
    throw Error(ErrorCode::kEmptyTrace, "forecast radius needs at least one displacement");
  }
  const auto& h = trace.r_min_history;
  const std::size_t n = h.size();
  double sum = 0.0;
  for (std::size_t k = 1; k <= trace.count; ++k) sum += Distance(h[n - k], h[n - k - 1]);
  return sum / static_cast<double>(trace.count);
}

std::string_view ToString(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::kApproach: return "approach";
    case StrategyTag::kPlus: return "+";
    case StrategyTag::kMinus: return "-";
    case StrategyTag::kEmergency: return "emergency";
  }
  return "approach";
}

Vec2 ClampComponents(const Vec2& d, double limit) {
  const double m = std::max(std::abs(d.x), std::abs(d.y));
  return m > limit ? d * (limit / m) : d;
}

UuvStepResult UuvNavigateStep(const UuvState& state, const Vec2& goal, const AmapsGrid& grid,
                              const ObstacleBoundary& latest, const UuvPlannerState& planner,
                              const AmapsConfig& config, const RobotCaps& caps, double dt) {
  UuvStepResult out;
  out.state = planner;
  out.waypoint = state.position;
  out.d_imin = std::numeric_limits<double>::infinity();
  const Vec2 pos = state.position;
  const Vec2 to_goal = goal - pos;
  if (to_goal.Norm() <= config.goal_tolerance) {
    out.terminal = true;
    out.state.avoiding = false;
    out.state.trace.Reset();
    return out;
  }
  const double limit = caps.v_max * dt;

  std::optional<Vec2> r_imin;
  try {
    r_imin = NearestAvoidPoint(pos, grid, latest);
    out.d_imin = Distance(pos, *r_imin);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoCoveredCells) throw;
  }

  const bool avoid = r_imin && out.d_imin <= config.switch_distance && InWay(pos, goal, latest);
  if (!avoid) {
    out.waypoint = pos + ClampComponents(to_goal, limit);
    out.tag = StrategyTag::kApproach;
    out.state.avoiding = false;
    out.state.trace.Reset();
    return out;
  }

  if (!planner.avoiding) {
    const double alpha = pos == latest.mass_center ? 0.0 : AngleBetween(latest.mass_center - pos, to_goal);
    out.state.direction = alpha >= 0.0 ? AvoidDirection::kPositive : AvoidDirection::kNegative;
  }
  out.state.avoiding = true;
  const AvoidDirection side = out.state.direction;
  out.tag = side == AvoidDirection::kPositive ? StrategyTag::kPlus : StrategyTag::kMinus;

  out.state.trace.Push(*r_imin);
  out.forecast_radius = out.state.trace.count > 0 ? ForecastRadius(out.state.trace) : 0.0;
  // A cell center sits up to half a diagonal inside the true boundary.
  const double radius = out.forecast_radius + config.cell_size * std::sqrt(0.5) + config.clearance_margin;

  Vec2 desired;
  if (out.d_imin > radius) {
    const SidedTangents t = TangentsBySide(pos, *r_imin, radius);
    desired = (side == AvoidDirection::kPositive ? t.cw_touch : t.ccw_touch) - pos;
  } else {
    out.tag = StrategyTag::kEmergency;
    const Vec2 away = (pos - *r_imin).Normalized();
    const double lean = (kPi / 2) * std::clamp(out.d_imin / radius, 0.0, 1.0);
    desired = Rotate(away, side == AvoidDirection::kPositive ? lean : -lean);
  }
  // Full reach along the chosen direction, componentwise bounded.
  out.waypoint = pos + ClampComponents(desired.Normalized() * (2.0 * limit), limit);
  return out;
}

}  // namespace navkit
