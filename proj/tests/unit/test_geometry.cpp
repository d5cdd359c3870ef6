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

#include "navkit/error.hpp"
#include "navkit/geometry.hpp"

namespace navkit {
namespace {

ObstacleBoundary RegularPolygon(Vec2 center, double radius, int n, double phase = 0.0) {
  ObstacleBoundary b;
  for (int i = 0; i < n; ++i) {
    b.vertices.push_back(center + UnitFromAngle(phase + 2.0 * kPi * i / n) * radius);
  }
  b.mass_center = center;
  return b;
}

// Minimum distance over a dense sampling of the outline, vertices included.
double SampledDistance(const Vec2& p, const ObstacleBoundary& b, int samples) {
  const std::size_t n = b.vertices.size();
  const int per_edge = samples / static_cast<int>(n);
  double best = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < per_edge; ++k) {
      const double t = static_cast<double>(k) / per_edge;
      const Vec2 q = b.vertices[i] * (1.0 - t) + b.vertices[(i + 1) % n] * t;
      best = std::min(best, Distance(p, q));
    }
  }
  return best;
}

// Star-shaped random outline about `center`.
ObstacleBoundary RandomStar(std::mt19937_64& rng, Vec2 center) {
  std::uniform_real_distribution<double> r(0.5, 2.0);
  std::uniform_int_distribution<int> count(3, 20);
  const int n = count(rng);
  ObstacleBoundary b;
  for (int i = 0; i < n; ++i) b.vertices.push_back(center + UnitFromAngle(2.0 * kPi * i / n) * r(rng));
  b.mass_center = center;
  return b;
}

TEST(Geometry, SquareNearestPoint) {
  ObstacleBoundary sq{{{2, -1}, {4, -1}, {4, 1}, {2, 1}}, {3, 0}};
  const DistanceResult d = DistToObstacle({0, 0}, sq);
  EXPECT_DOUBLE_EQ(d.distance, 2.0);
  EXPECT_DOUBLE_EQ(d.closest.x, 2.0);
  EXPECT_DOUBLE_EQ(d.closest.y, 0.0);
}

TEST(Geometry, TwelveGonAgainstDenseSampling) {
  const ObstacleBoundary g = RegularPolygon({5, 0}, 1.0, 12);
  const double oracle = SampledDistance({0, 0}, g, 100000);
  EXPECT_NEAR(DistToObstacle({0, 0}, g).distance, oracle, 1e-6);
}

TEST(Geometry, TranslationInvariance) {
  ObstacleBoundary sq{{{2, -1}, {4, -1}, {4, 1}, {2, 1}}, {3, 0}};
  ObstacleBoundary moved = sq;
  for (Vec2& v : moved.vertices) v += Vec2{1, 1};
  moved.mass_center += Vec2{1, 1};
  EXPECT_NEAR(DistToObstacle({0, 0}, moved).distance, DistToObstacle({-1, -1}, sq).distance, 1e-12);
}

TEST(Geometry, RandomPolygonsAgainstDenseSampling) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const ObstacleBoundary b = RandomStar(rng, {0, 0});
    Vec2 p;
    do {
      p = {u(rng), u(rng)};
    } while (SignedClearance(p, b) <= 0.05);
    const double oracle = SampledDistance(p, b, 100000);
    EXPECT_NEAR(DistToObstacle(p, b).distance, oracle, 1e-6) << "trial " << trial;
  }
}

TEST(Geometry, InsideQueryThrows) {
  const ObstacleBoundary g = RegularPolygon({0, 0}, 1.0, 8);
  try {
    DistToObstacle({0.1, 0.0}, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPInsideObstacle);
  }
  EXPECT_LT(SignedClearance({0.1, 0.0}, g), 0.0);
}

TEST(Geometry, ContainsAndArea) {
  ObstacleBoundary sq{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}, {1, 1}};
  EXPECT_TRUE(Contains(sq, {1, 1}));
  EXPECT_TRUE(Contains(sq, {2, 1}));  // on an edge
  EXPECT_FALSE(Contains(sq, {3, 1}));
  EXPECT_DOUBLE_EQ(std::abs(Area(sq)), 4.0);
}

TEST(Geometry, ValidateBoundaryRejectsBowtie) {
  ObstacleBoundary bow{{{0, 0}, {2, 2}, {2, 0}, {0, 2}}, {1, 1}};
  EXPECT_THROW(ValidateBoundary(bow), Error);
  EXPECT_NO_THROW(ValidateBoundary(RegularPolygon({0, 0}, 1, 6)));
}

TEST(Geometry, TangentsAtThirtyDegrees) {
  const TangentPair t = TangentsToCircle({0, 0}, {4, 0}, 2.0);
  EXPECT_NEAR(t.angle1, -kPi / 6, 1e-12);
  EXPECT_NEAR(t.angle2, kPi / 6, 1e-12);
}

TEST(Geometry, TangentsToPointCircle) {
  const TangentPair t = TangentsToCircle({0, 0}, {3, 3}, 0.0);
  EXPECT_NEAR(t.angle1, kPi / 4, 1e-12);
  EXPECT_NEAR(t.angle2, kPi / 4, 1e-12);
  EXPECT_NEAR(Distance(t.touch_point1, {3, 3}), 0.0, 1e-12);
  EXPECT_NEAR(Distance(t.touch_point2, {3, 3}), 0.0, 1e-12);
}

TEST(Geometry, TangencyResiduals) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0), rad(0.1, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 p{u(rng), u(rng)};
    const Vec2 c{u(rng), u(rng)};
    const double r = rad(rng);
    if (Distance(p, c) <= r * 1.01) continue;
    const TangentPair t = TangentsToCircle(p, c, r);
    for (const auto& [angle, touch] : {std::pair{t.angle1, t.touch_point1}, std::pair{t.angle2, t.touch_point2}}) {
      const Vec2 dir = UnitFromAngle(angle);
      // Distance from the center to the tangent line through p.
      EXPECT_NEAR(std::abs(Cross(dir, c - p)), r, 1e-9);
      EXPECT_NEAR(Distance(touch, c), r, 1e-9);
      EXPECT_NEAR(Dot(touch - p, touch - c), 0.0, 1e-9);
    }
  }
}

TEST(Geometry, TangentsInsideCircleThrow) {
  try {
    TangentsToCircle({0, 0}, {1, 0}, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsideCircle);
  }
}

TEST(Geometry, TangentsBySideLabels) {
  const SidedTangents s = TangentsBySide({0, 0}, {4, 0}, 2.0);
  EXPECT_NEAR(s.ccw_angle, kPi / 6, 1e-12);
  EXPECT_NEAR(s.cw_angle, -kPi / 6, 1e-12);
  EXPECT_NEAR(s.length, std::sqrt(12.0), 1e-12);
  EXPECT_GT(s.ccw_touch.y, 0.0);
}

TEST(Geometry, AngleBetweenConventions) {
  EXPECT_DOUBLE_EQ(AngleBetween({0, 1}, {1, 0}), kPi / 2);
  EXPECT_DOUBLE_EQ(AngleBetween({1, 2}, {1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(AngleBetween({-1, 0}, {1, 0}), kPi);
  EXPECT_THROW(AngleBetween({0, 0}, {1, 0}), Error);
}

TEST(Geometry, ConvexVisibleSliceIsSilhouetteArc) {
  const ObstacleBoundary g = RegularPolygon({5, 0}, 1.0, 24);
  const Vec2 p{0, 0};
  const VisionSlice slice = VisibleBoundary(p, g, Degrees(0.1));
  const Silhouette sil = ComputeSilhouette(p, g);
  ASSERT_FALSE(slice.points.empty());
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < slice.points.size(); ++i) {
    lo = std::min(lo, slice.angles[i]);
    hi = std::max(hi, slice.angles[i]);
    EXPECT_NEAR(SignedClearance(slice.points[i], g), 0.0, 1e-9);
  }
  EXPECT_NEAR(lo, sil.min_bearing, Degrees(0.1));
  EXPECT_NEAR(hi, sil.max_bearing, Degrees(0.1));
}

TEST(Geometry, CavityFacingAwayIsHidden) {
  // C shape opening to +x, viewed from -x.
  ObstacleBoundary c{{{0, 0}, {3, 0}, {3, 0.5}, {0.5, 0.5}, {0.5, 2.5}, {3, 2.5}, {3, 3}, {0, 3}},
                     {0.6, 1.5}};
  const VisionSlice slice = VisibleBoundary({-5, 1.5}, c, Degrees(0.1));
  ASSERT_FALSE(slice.points.empty());
  for (const Vec2& q : slice.points) EXPECT_LE(q.x, 1e-9);  // only the back wall is seen
}

TEST(Geometry, FarViewSpanIsAngularDiameter) {
  const ObstacleBoundary g = RegularPolygon({1000, 0}, 1.0, 36);
  const VisionSlice slice = VisibleBoundary({0, 0}, g, Degrees(0.001));
  double lo = INFINITY, hi = -INFINITY;
  for (double a : slice.angles) {
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  EXPECT_NEAR(hi - lo, 2.0 * std::asin(1.0 / 1000.0), Degrees(0.002));
}

TEST(Geometry, RayCastAndSegmentHits) {
  ObstacleBoundary sq{{{2, -1}, {4, -1}, {4, 1}, {2, 1}}, {3, 0}};
  const auto hit = RayCast({0, 0}, {1, 0}, sq);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->x, 2.0, 1e-12);
  EXPECT_FALSE(RayCast({0, 0}, {-1, 0}, sq).has_value());
  EXPECT_TRUE(SegmentHitsObstacle({0, 0}, {5, 0}, sq));
  EXPECT_FALSE(SegmentHitsObstacle({0, 2}, {5, 2}, sq));
}

}  // namespace
}  // namespace navkit
