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

#include "navkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navkit/error.hpp"
#include "navkit/kernels/kernels.hpp"

namespace navkit {
namespace {

constexpr double kTieTolerance = 1e-12;

struct ClosedRing {
  std::vector<double> xs;
  std::vector<double> ys;
};

// SoA copy with the first vertex repeated at the end.
const ClosedRing& ToRing(const ObstacleBoundary& obs) {
  thread_local ClosedRing ring;
  const std::size_t n = obs.vertices.size();
  ring.xs.resize(n + 1);
  ring.ys.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    ring.xs[i] = obs.vertices[i].x;
    ring.ys[i] = obs.vertices[i].y;
  }
  ring.xs[n] = obs.vertices[0].x;
  ring.ys[n] = obs.vertices[0].y;
  return ring;
}

bool SegmentsIntersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = Cross(d - c, a - c);
  const double d2 = Cross(d - c, b - c);
  const double d3 = Cross(b - a, c - a);
  const double d4 = Cross(b - a, d - a);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

// Ray parameter s of the hit with segment a-b, if any.
std::optional<double> RaySegment(const Vec2& o, const Vec2& u, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double denom = Cross(u, e);
  if (std::abs(denom) < 1e-15 * (u.Norm() * e.Norm() + 1e-300)) return std::nullopt;
  const Vec2 w = a - o;
  const double s = Cross(w, e) / denom;
  const double t = Cross(w, u) / denom;
  if (t < -1e-12 || t > 1.0 + 1e-12 || s <= 1e-12) return std::nullopt;
  return s;
}

}  // namespace

void ValidateBoundary(const ObstacleBoundary& obs) {
  const auto& v = obs.vertices;
  if (v.size() < 3) throw Error(ErrorCode::kInvalidArgument, "obstacle needs >= 3 vertices");
  for (const Vec2& p : v) {
    if (!IsFinite(p)) throw Error(ErrorCode::kInvalidArgument, "non-finite obstacle vertex");
  }
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    if (a == b) throw Error(ErrorCode::kInvalidArgument, "repeated obstacle vertex");
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (SegmentsIntersect(a, b, v[j], v[(j + 1) % n])) {
        throw Error(ErrorCode::kInvalidArgument, "obstacle outline self-intersects");
      }
    }
  }
  if (!Contains(obs, obs.mass_center)) {
    throw Error(ErrorCode::kInvalidArgument, "mass center lies outside the outline");
  }
}

bool Contains(const ObstacleBoundary& obs, const Vec2& p) {
  const ClosedRing& ring = ToRing(obs);
  const std::size_t n = obs.vertices.size();
  std::uint8_t inside = 0;
  kernels::Active().points_in_polygon(&p.x, &p.y, 1, ring.xs.data(), ring.ys.data(), n,
                                      &inside);
  if (inside) return true;
  thread_local std::vector<double> d2;
  thread_local std::vector<double> t;
  d2.resize(n);
  t.resize(n);
  kernels::Active().segment_distances(p.x, p.y, ring.xs.data(), ring.ys.data(), n, d2.data(),
                                      t.data());
  return *std::min_element(d2.begin(), d2.end()) == 0.0;
}

double Area(const ObstacleBoundary& obs) {
  double twice = 0.0;
  const auto& v = obs.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) twice += Cross(v[j], v[i]);
  return 0.5 * std::abs(twice);
}

BoundingBox Bounds(std::span<const Vec2> points) {
  BoundingBox box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Vec2& p : points) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y)};
  }
  return box;
}

DistanceResult DistToObstacle(const Vec2& p, const ObstacleBoundary& obs) {
  const ClosedRing& ring = ToRing(obs);
  const std::size_t n = obs.vertices.size();
  thread_local std::vector<double> d2;
  thread_local std::vector<double> t;
  d2.resize(n);
  t.resize(n);
  const auto& k = kernels::Active();
  k.segment_distances(p.x, p.y, ring.xs.data(), ring.ys.data(), n, d2.data(), t.data());

  const double best = *std::min_element(d2.begin(), d2.end());
  std::uint8_t inside = 0;
  k.points_in_polygon(&p.x, &p.y, 1, ring.xs.data(), ring.ys.data(), n, &inside);
  if (inside || best == 0.0) {
    throw Error(ErrorCode::kPInsideObstacle, "query point is not outside the obstacle");
  }

  DistanceResult result{std::sqrt(best), {}};
  double best_bearing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (d2[i] > best * (1.0 + kTieTolerance)) continue;
    const Vec2 a = obs.vertices[i];
    const Vec2 b = obs.vertices[(i + 1) % n];
    const Vec2 c = a + t[i] * (b - a);
    const double bearing = (c - p).Angle();
    if (bearing < best_bearing) {
      best_bearing = bearing;
      result.closest = c;
    }
  }
  return result;
}

double SignedClearance(const Vec2& p, const ObstacleBoundary& obs) {
  const ClosedRing& ring = ToRing(obs);
  const std::size_t n = obs.vertices.size();
  thread_local std::vector<double> d2;
  thread_local std::vector<double> t;
  d2.resize(n);
  t.resize(n);
  const auto& k = kernels::Active();
  k.segment_distances(p.x, p.y, ring.xs.data(), ring.ys.data(), n, d2.data(), t.data());
  const double d = std::sqrt(*std::min_element(d2.begin(), d2.end()));
  std::uint8_t inside = 0;
  k.points_in_polygon(&p.x, &p.y, 1, ring.xs.data(), ring.ys.data(), n, &inside);
  return inside ? -d : d;
}

std::optional<Vec2> RayCast(const Vec2& origin, const Vec2& direction,
                            const ObstacleBoundary& obs) {
  const auto& v = obs.vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (auto s = RaySegment(origin, direction, v[i], v[(i + 1) % v.size()])) {
      best = std::min(best, *s);
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return origin + best * direction;
}

bool SegmentHitsObstacle(const Vec2& a, const Vec2& b, const ObstacleBoundary& obs) {
  const auto& v = obs.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (SegmentsIntersect(a, b, v[i], v[(i + 1) % v.size()])) return true;
  }
  return Contains(obs, a) || Contains(obs, b);
}

Silhouette ComputeSilhouette(const Vec2& p, const ObstacleBoundary& obs) {
  const auto& v = obs.vertices;
  const double ref = (obs.mass_center - p).Angle();
  double prev_abs = (v[0] - p).Angle();
  double unwrapped = NormalizeAngle(prev_abs - ref);
  Silhouette s{unwrapped, unwrapped, v[0], v[0]};
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double abs_bearing = (v[i] - p).Angle();
    unwrapped += NormalizeAngle(abs_bearing - prev_abs);
    prev_abs = abs_bearing;
    if (unwrapped < s.min_bearing) {
      s.min_bearing = unwrapped;
      s.min_point = v[i];
    }
    if (unwrapped > s.max_bearing) {
      s.max_bearing = unwrapped;
      s.max_point = v[i];
    }
  }
  s.min_bearing += ref;
  s.max_bearing += ref;
  return s;
}

VisionSlice VisibleBoundary(const Vec2& p, const ObstacleBoundary& obs, double resolution,
                            std::span<const ObstacleBoundary> occluders) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be > 0");
  if (Contains(obs, p)) {
    throw Error(ErrorCode::kPInsideObstacle, "viewpoint is not outside the obstacle");
  }
  const Silhouette sil = ComputeSilhouette(p, obs);
  const double span = sil.max_bearing - sil.min_bearing;
  const auto steps = static_cast<std::size_t>(std::floor(span / resolution));

  VisionSlice slice;
  auto try_ray = [&](double bearing) {
    const Vec2 dir = UnitFromAngle(bearing);
    const std::optional<Vec2> hit = RayCast(p, dir, obs);
    if (!hit) return;
    const double reach = Distance(p, *hit);
    for (const ObstacleBoundary& occ : occluders) {
      if (auto blocker = RayCast(p, dir, occ); blocker && Distance(p, *blocker) < reach) return;
    }
    slice.points.push_back(*hit);
    slice.angles.push_back(NormalizeAngle(bearing));
  };
  for (std::size_t i = 0; i <= steps; ++i) {
    try_ray(sil.min_bearing + static_cast<double>(i) * resolution);
  }
  if (sil.min_bearing + static_cast<double>(steps) * resolution < sil.max_bearing) {
    try_ray(sil.max_bearing);
  }
  return slice;
}

SidedTangents TangentsBySide(const Vec2& p, const Vec2& center, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative radius");
  const Vec2 to_center = center - p;
  const double d = to_center.Norm();
  if (d <= radius || d == 0.0) {
    throw Error(ErrorCode::kInsideCircle, "point lies inside the circle");
  }
  const double bearing = to_center.Angle();
  if (radius == 0.0) {
    return {NormalizeAngle(bearing), NormalizeAngle(bearing), center, center, d};
  }
  const double half = std::asin(radius / d);
  const double length = std::sqrt((d - radius) * (d + radius));
  SidedTangents t;
  t.ccw_angle = NormalizeAngle(bearing + half);
  t.cw_angle = NormalizeAngle(bearing - half);
  t.ccw_touch = p + length * UnitFromAngle(bearing + half);
  t.cw_touch = p + length * UnitFromAngle(bearing - half);
  t.length = length;
  return t;
}

TangentPair TangentsToCircle(const Vec2& p, const Vec2& center, double radius) {
  const SidedTangents s = TangentsBySide(p, center, radius);
  if (s.cw_angle <= s.ccw_angle) return {s.cw_angle, s.ccw_angle, s.cw_touch, s.ccw_touch};
  return {s.ccw_angle, s.cw_angle, s.ccw_touch, s.cw_touch};
}

double AngleBetween(const Vec2& u, const Vec2& v) {
  if (u.SquaredNorm() == 0.0 || v.SquaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroVector, "angle undefined for a zero vector");
  }
  return NormalizeAngle(std::atan2(Cross(v, u), Dot(v, u)));
}

}  // namespace navkit
