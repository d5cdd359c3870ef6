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

#include <optional>
#include <span>
#include <vector>

#include "navkit/vec.hpp"

namespace navkit {

// Closed polyline obstacle outline. The first vertex implicitly follows the last.
struct ObstacleBoundary {
  std::vector<Vec2> vertices;
  Vec2 mass_center;
};

// Throws kInvalidArgument unless the outline has at least three finite
// vertices, does not self-intersect, and encloses its mass center.
void ValidateBoundary(const ObstacleBoundary& obs);

// Even-odd containment; points exactly on an edge count as inside.
bool Contains(const ObstacleBoundary& obs, const Vec2& p);
double Area(const ObstacleBoundary& obs);

struct BoundingBox {
  Vec2 min;
  Vec2 max;
};
BoundingBox Bounds(std::span<const Vec2> points);

struct DistanceResult {
  double distance = 0.0;
  Vec2 closest;
};

// Nearest boundary point; among (numerically) tied points the one with the
// smallest bearing from p wins. Throws kPInsideObstacle when p is not
// strictly outside.
DistanceResult DistToObstacle(const Vec2& p, const ObstacleBoundary& obs);

// Distance to the boundary, negative when p is inside.
double SignedClearance(const Vec2& p, const ObstacleBoundary& obs);

// First boundary point hit by the ray origin + s * direction, s > 0.
std::optional<Vec2> RayCast(const Vec2& origin, const Vec2& direction,
                            const ObstacleBoundary& obs);

// True when the closed segment a-b touches the obstacle (edge crossing or an
// endpoint inside).
bool SegmentHitsObstacle(const Vec2& a, const Vec2& b, const ObstacleBoundary& obs);

struct VisionSlice {
  std::vector<Vec2> points;
  std::vector<double> angles;  // bearing from the viewpoint, (-pi, pi]
};

inline constexpr double kDefaultVisionResolution = 0.5 * kPi / 180.0;

// Boundary points visible from p: rays are cast across the obstacle's angular
// extent every `resolution` radians (plus both silhouette bearings) and the
// first hit of each is kept. Points hidden behind any of `occluders` are
// dropped. Throws kPInsideObstacle.
VisionSlice VisibleBoundary(const Vec2& p, const ObstacleBoundary& obs,
                            double resolution = kDefaultVisionResolution,
                            std::span<const ObstacleBoundary> occluders = {});

struct Silhouette {
  double min_bearing = 0.0;  // unwrapped, min_bearing <= max_bearing
  double max_bearing = 0.0;
  Vec2 min_point;  // outline vertex attaining each extreme
  Vec2 max_point;
};

// Angular extent of the outline as seen from an outside point.
Silhouette ComputeSilhouette(const Vec2& p, const ObstacleBoundary& obs);

struct TangentPair {
  double angle1 = 0.0;  // angle1 <= angle2, both in (-pi, pi]
  double angle2 = 0.0;
  Vec2 touch_point1;
  Vec2 touch_point2;
};

// Both tangent lines from p to the circle. Throws kInsideCircle when
// |p - center| <= radius.
TangentPair TangentsToCircle(const Vec2& p, const Vec2& center, double radius);

// Same construction labelled by rotation sense about p: `ccw` is reached by
// turning the sight line p->center counter-clockwise.
struct SidedTangents {
  double ccw_angle = 0.0;
  double cw_angle = 0.0;
  Vec2 ccw_touch;
  Vec2 cw_touch;
  double length = 0.0;  // |p - touch|, same for both
};
SidedTangents TangentsBySide(const Vec2& p, const Vec2& center, double radius);

// Signed angle in (-pi, pi], positive counter-clockwise from v to u.
// Throws kZeroVector.
double AngleBetween(const Vec2& u, const Vec2& v);

}  // namespace navkit
