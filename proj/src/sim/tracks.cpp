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
#include <cstdlib>
#include <random>
#include <string>

#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit {
namespace {

std::vector<Vec2> Outline(const ShapeSpec& shape, std::mt19937_64& rng) {
  const int n = std::max(3, shape.segments);
  std::vector<Vec2> out;
  auto add_radial = [&](auto radius_at) {
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * kPi * i / n;
      out.push_back(radius_at(phi) * UnitFromAngle(phi));
    }
  };
  if (shape.kind == "polygon") return shape.vertices;
  if (shape.kind == "circle" || shape.kind == "sphere") {
    add_radial([&](double) { return shape.radius; });
  } else if (shape.kind == "ellipse" || shape.kind == "ellipsoid") {
    const double a = shape.semi_axes.x;
    const double b = shape.semi_axes.y;
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * kPi * i / n;
      out.push_back({a * std::cos(phi), b * std::sin(phi)});
    }
  } else if (shape.kind == "blob") {
    std::uniform_real_distribution<double> weight(0.5, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<double> w;
    std::vector<double> p;
    double total = 0.0;
    for (int m = 0; m < shape.lobes; ++m) {
      w.push_back(weight(rng));
      p.push_back(phase(rng));
      total += w.back();
    }
    add_radial([&](double phi) {
      double r = 1.0;
      for (int m = 0; m < shape.lobes; ++m) {
        r += shape.amplitude * (w[m] / total) * std::cos((m + 2) * phi + p[m]);
      }
      return shape.radius * r;
    });
  } else {
    throw Error(ErrorCode::kParseError, "unknown shape kind '" + shape.kind + "'");
  }
  return out;
}

bool IsSpatialKind(const std::string& kind) { return kind == "sphere" || kind == "ellipsoid"; }

Vec3 SemiAxes(const ShapeSpec& shape) {
  if (shape.kind == "sphere") return {shape.radius, shape.radius, shape.radius};
  return shape.semi_axes;
}

}  // namespace

std::uint64_t EffectiveSeed(const Scenario& s) {
  if (const char* env = std::getenv("NAVKIT_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return s.seed;
}

std::vector<ObstacleTrack> ExpandObstacles(const Scenario& s, std::uint64_t seed) {
  const std::size_t steps = s.EffectiveHorizon() + 1;
  std::vector<ObstacleTrack> tracks;
  tracks.reserve(s.obstacles.size());
  for (const ObstacleSpec& spec : s.obstacles) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(spec.id) + 1);
    ObstacleTrack track;
    track.id = spec.id;
    track.dt = s.dt;
    track.spatial = IsSpatialKind(spec.shape.kind);
    track.body = Outline(spec.shape, rng);
    if (track.spatial) {
      track.semi_axes = SemiAxes(spec.shape);
      track.body_surface = SampleEllipsoid({}, track.semi_axes, spec.shape.spacing);
    }

    track.centers.resize(steps);
    track.headings.resize(steps);
    track.centers[0] = spec.center;
    track.headings[0] = spec.heading;
    const MotionSpec& m = spec.motion;
    std::normal_distribution<double> gauss(0.0, 1.0);
    double course = m.velocity.Xy().SquaredNorm() > 0.0
                        ? m.velocity.Xy().Angle()
                        : std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    for (std::size_t k = 0; k + 1 < steps; ++k) {
      Vec3 v;
      double u = m.angular_velocity;
      if (m.kind == "constant") {
        v = m.velocity;
      } else if (m.kind == "table") {
        if (!m.velocity_table.empty()) v = m.velocity_table[std::min(k, m.velocity_table.size() - 1)];
        if (!m.angular_table.empty()) u = m.angular_table[std::min(k, m.angular_table.size() - 1)];
      } else if (m.kind == "wander") {
        const Vec2 planar = m.speed * UnitFromAngle(course);
        v = {planar.x, planar.y, 0.0};
        course += m.turn_sigma * std::sqrt(s.dt) * gauss(rng);
      } else {
        throw Error(ErrorCode::kParseError, "unknown motion kind '" + m.kind + "'");
      }
      track.centers[k + 1] = track.centers[k] + s.dt * v;
      track.headings[k + 1] = track.headings[k] + s.dt * u;
    }

    const DeformationSpec& d = spec.deformation;
    if (d.kind == "random") {
      constexpr int kModes = 3;
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
      double amp[kModes] = {0.0, 0.0, 0.0};
      double ph[kModes];
      for (double& p : ph) p = phase(rng);
      // Each mode moves by at most `step`, so a vertex's radial scale changes
      // by at most rate relative to its smallest possible value.
      const double step = d.rate * (1.0 - d.limit) / kModes;
      track.scales.resize(steps);
      for (std::size_t k = 0; k < steps; ++k) {
        if (k > 0) {
          for (double& a : amp) a = std::clamp(a + step * unit(rng), -d.limit / kModes, d.limit / kModes);
        }
        auto& row = track.scales[k];
        row.resize(track.body.size());
        for (std::size_t i = 0; i < track.body.size(); ++i) {
          const double phi = track.body[i].Angle();
          double sc = 1.0;
          for (int mode = 0; mode < kModes; ++mode) sc += amp[mode] * std::cos((mode + 1) * phi + ph[mode]);
          row[i] = sc;
        }
      }
    } else if (d.kind == "table") {
      track.scales.resize(steps);
      for (std::size_t k = 0; k < steps; ++k) {
        track.scales[k] = d.table.empty() ? std::vector<double>(track.body.size(), 1.0)
                                          : d.table[std::min(k, d.table.size() - 1)];
        if (track.scales[k].size() != track.body.size()) {
          throw Error(ErrorCode::kParseError,
                      "deformation table row has " + std::to_string(track.scales[k].size()) +
                          " entries, outline has " + std::to_string(track.body.size()));
        }
      }
    } else if (d.kind != "none") {
      throw Error(ErrorCode::kParseError, "unknown deformation kind '" + d.kind + "'");
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

ObstacleBoundary ObstacleTrack::BoundaryAt(std::size_t k) const {
  k = std::min(k, steps() - 1);
  ObstacleBoundary b;
  b.mass_center = centers[k].Xy();
  const double c = std::cos(headings[k]);
  const double s = std::sin(headings[k]);
  b.vertices.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Vec2 p = scales.empty() ? body[i] : body[i] * scales[k][i];
    b.vertices.push_back({b.mass_center.x + c * p.x - s * p.y, b.mass_center.y + s * p.x + c * p.y});
  }
  return b;
}

SurfaceSamples ObstacleTrack::SurfaceAt(std::size_t k) const {
  k = std::min(k, steps() - 1);
  const double c = std::cos(headings[k]);
  const double s = std::sin(headings[k]);
  const Vec3& o = centers[k];
  SurfaceSamples out;
  out.xs.resize(body_surface.size());
  out.ys.resize(body_surface.size());
  out.zs.resize(body_surface.size());
  for (std::size_t i = 0; i < body_surface.size(); ++i) {
    const double x = body_surface.xs[i];
    const double y = body_surface.ys[i];
    out.xs[i] = o.x + c * x - s * y;
    out.ys[i] = o.y + s * x + c * y;
    out.zs[i] = o.z + body_surface.zs[i];
  }
  return out;
}

double ObstacleTrack::ClearanceAt(std::size_t k, const Vec2& p) const {
  return SignedClearance(p, BoundaryAt(k));
}

double ObstacleTrack::ClearanceAt(std::size_t k, const Vec3& p) const {
  k = std::min(k, steps() - 1);
  const Vec3 rel = p - centers[k];
  const double c = std::cos(headings[k]);
  const double s = std::sin(headings[k]);
  const Vec3 body_p{c * rel.x + s * rel.y, -s * rel.x + c * rel.y, rel.z};
  const double f = (body_p.x / semi_axes.x) * (body_p.x / semi_axes.x) +
                   (body_p.y / semi_axes.y) * (body_p.y / semi_axes.y) +
                   (body_p.z / semi_axes.z) * (body_p.z / semi_axes.z);
  const double d = NearestSurfacePoint(body_p, body_surface).distance;
  return f <= 1.0 ? -d : d;
}

Vec3 ObstacleTrack::VelocityAt(std::size_t k) const {
  if (steps() < 2) return {};
  k = std::min(k, steps() - 2);
  return (centers[k + 1] - centers[k]) / dt;
}

double ObstacleTrack::AngularVelocityAt(std::size_t k) const {
  if (steps() < 2) return 0.0;
  k = std::min(k, steps() - 2);
  return (headings[k + 1] - headings[k]) / dt;
}

}  // namespace navkit
