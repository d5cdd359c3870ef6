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

#include "navkit/coverage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "navkit/error.hpp"
#include "navkit/kernels/kernels.hpp"
#include "navkit/sim.hpp"

namespace navkit {

namespace {

double Orient(const Vec2& a, const Vec2& b, const Vec2& c) { return Cross(b - a, c - a); }

bool OnSegment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool SegmentsTouch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = Orient(a, b, c);
  const double o2 = Orient(a, b, d);
  const double o3 = Orient(c, d, a);
  const double o4 = Orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  return (o1 == 0 && OnSegment(a, b, c)) || (o2 == 0 && OnSegment(a, b, d)) ||
         (o3 == 0 && OnSegment(c, d, a)) || (o4 == 0 && OnSegment(c, d, b));
}

// Counter-clockwise convex polygon, closed.
bool InsideConvex(std::span<const Vec2> poly, const Vec2& p) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (Orient(poly[i], poly[(i + 1) % poly.size()], p) < 0.0) return false;
  }
  return true;
}

bool ConvexMeetsRegion(std::span<const Vec2> poly, const Region& region) {
  const auto& rv = region.polygon.vertices;
  for (const Vec2& p : rv) {
    if (InsideConvex(poly, p)) return true;
  }
  for (const Vec2& p : poly) {
    if (Contains(region.polygon, p)) return true;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    for (std::size_t j = 0; j < rv.size(); ++j) {
      if (SegmentsTouch(a, b, rv[j], rv[(j + 1) % rv.size()])) return true;
    }
  }
  return false;
}

struct SampleGrid {
  Vec2 min;
  double step = 1.0;
  long nx = 0;
  long ny = 0;
  std::vector<long> index;  // grid cell -> sample index, -1 outside
  std::vector<Vec2> points;
};

bool OnBoundary(const ObstacleBoundary& poly, const Vec2& p) {
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    if (Orient(a, b, p) == 0.0 && OnSegment(a, b, p)) return true;
  }
  return false;
}

SampleGrid BuildGrid(const Region& region, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sample step must be positive");
  const BoundingBox box = Bounds(region.polygon.vertices);
  SampleGrid g;
  g.min = box.min;
  g.step = step;
  g.nx = static_cast<long>(std::floor((box.max.x - box.min.x) / step + 1e-9)) + 1;
  g.ny = static_cast<long>(std::floor((box.max.y - box.min.y) / step + 1e-9)) + 1;
  const std::size_t total = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
  std::vector<double> xs(total), ys(total);
  for (long j = 0; j < g.ny; ++j) {
    for (long i = 0; i < g.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j * g.nx + i);
      xs[k] = box.min.x + static_cast<double>(i) * step;
      ys[k] = box.min.y + static_cast<double>(j) * step;
    }
  }
  const auto& rv = region.polygon.vertices;
  std::vector<double> px(rv.size()), py(rv.size());
  for (std::size_t i = 0; i < rv.size(); ++i) {
    px[i] = rv[i].x;
    py[i] = rv[i].y;
  }
  std::vector<std::uint8_t> inside(total);
  kernels::Active().points_in_polygon(xs.data(), ys.data(), total, px.data(), py.data(),
                                      rv.size(), inside.data());
  g.index.assign(total, -1);
  for (std::size_t k = 0; k < total; ++k) {
    const Vec2 p{xs[k], ys[k]};
    if (inside[k] || OnBoundary(region.polygon, p)) {
      g.index[k] = static_cast<long>(g.points.size());
      g.points.push_back(p);
    }
  }
  return g;
}

// Same expression as the cover_mask kernel.
bool InDisc(const Vec2& s, const Vec3& c, double r2) {
  const double dx = s.x - c.x;
  const double dy = s.y - c.y;
  return (dx * dx + dy * dy) <= r2;
}

template <typename Fn>
void ForSamplesInDisc(const SampleGrid& g, const Vec3& c, double r, Fn&& fn) {
  const long i0 = std::max(0L, static_cast<long>(std::floor((c.x - r - g.min.x) / g.step)) - 1);
  const long i1 = std::min(g.nx - 1, static_cast<long>(std::ceil((c.x + r - g.min.x) / g.step)) + 1);
  const long j0 = std::max(0L, static_cast<long>(std::floor((c.y - r - g.min.y) / g.step)) - 1);
  const long j1 = std::min(g.ny - 1, static_cast<long>(std::ceil((c.y + r - g.min.y) / g.step)) + 1);
  const double r2 = r * r;
  for (long j = j0; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) {
      const long s = g.index[static_cast<std::size_t>(j * g.nx + i)];
      if (s >= 0 && InDisc(g.points[static_cast<std::size_t>(s)], c, r2)) fn(s);
    }
  }
}

std::vector<Vec3> Prune(const std::vector<Vec3>& candidates, const Region& region, double r,
                        double step) {
  const SampleGrid g = BuildGrid(region, step);
  if (g.points.empty()) return candidates;
  std::vector<std::vector<long>> covered(candidates.size());
  std::vector<int> count(g.points.size(), 0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    ForSamplesInDisc(g, candidates[c], r, [&](long s) {
      covered[c].push_back(s);
      ++count[static_cast<std::size_t>(s)];
    });
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return covered[a].size() < covered[b].size();
  });
  std::vector<bool> keep(candidates.size(), true);
  for (std::size_t c : order) {
    const bool redundant = std::all_of(covered[c].begin(), covered[c].end(),
                                       [&](long s) { return count[static_cast<std::size_t>(s)] >= 2; });
    if (!redundant) continue;
    keep[c] = false;
    for (long s : covered[c]) --count[static_cast<std::size_t>(s)];
  }
  std::vector<Vec3> out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (keep[c]) out.push_back(candidates[c]);
  }
  return out;
}

}  // namespace

double Heightmap::At(const Vec2& p) const {
  const double gx = std::clamp((p.x - origin.x) / spacing, 0.0, static_cast<double>(nx - 1));
  const double gy = std::clamp((p.y - origin.y) / spacing, 0.0, static_cast<double>(ny - 1));
  const int i = std::min(static_cast<int>(gx), nx - 2);
  const int j = std::min(static_cast<int>(gy), ny - 2);
  const double fx = gx - i;
  const double fy = gy - j;
  auto v = [&](int a, int b) { return values[static_cast<std::size_t>(b * nx + a)]; };
  const double lo = v(i, j) * (1.0 - fx) + v(i + 1, j) * fx;
  const double hi = v(i, j + 1) * (1.0 - fx) + v(i + 1, j + 1) * fx;
  return lo * (1.0 - fy) + hi * fy;
}

void ValidateRegion(const Region& region) {
  const auto& v = region.polygon.vertices;
  if (v.size() < 3) throw Error(ErrorCode::kInvalidArgument, "region needs >= 3 vertices");
  for (const Vec2& p : v) {
    if (!IsFinite(p)) throw Error(ErrorCode::kInvalidArgument, "non-finite region vertex");
  }
  const std::size_t n = v.size();
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    if (a == b) throw Error(ErrorCode::kInvalidArgument, "repeated region vertex");
    area2 += Cross(a, b);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (SegmentsTouch(a, b, v[j], v[(j + 1) % n])) {
        throw Error(ErrorCode::kInvalidArgument, "region outline self-intersects");
      }
    }
  }
  if (area2 == 0.0) throw Error(ErrorCode::kInvalidArgument, "region has zero area");
  if (region.heightmap) {
    const Heightmap& h = *region.heightmap;
    if (h.nx < 2 || h.ny < 2 || !(h.spacing > 0.0) ||
        h.values.size() != static_cast<std::size_t>(h.nx) * static_cast<std::size_t>(h.ny)) {
      throw Error(ErrorCode::kInvalidArgument, "malformed heightmap");
    }
    for (double z : h.values) {
      if (!std::isfinite(z)) throw Error(ErrorCode::kInvalidArgument, "non-finite elevation");
    }
    const BoundingBox box = Bounds(v);
    const Vec2 hi = h.Max();
    if (h.origin.x > box.min.x || h.origin.y > box.min.y || hi.x < box.max.x || hi.y < box.max.y) {
      throw Error(ErrorCode::kInvalidArgument, "heightmap does not cover the region");
    }
  }
}

Altitude AltitudeForRadius(double radius, const FovSpec& fov) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidArgument, "coverage radius must be positive");
  }
  if (!(fov.theta > 0.0 && fov.theta < kPi)) {
    throw Error(ErrorCode::kInvalidArgument, "FOV angle must lie in (0, pi)");
  }
  if (!(fov.z_min >= 0.0 && fov.z_min <= fov.z_max)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 <= z_min <= z_max");
  }
  const double t = std::tan(0.5 * fov.theta);
  Altitude a{radius / t, radius, false};
  if (a.z < fov.z_min || a.z > fov.z_max) {
    a.z = std::clamp(a.z, fov.z_min, fov.z_max);
    a.radius = a.z * t;
    a.clipped = true;
  }
  return a;
}

WaypointSet TriangulateRegion(const Region& region, double radius, const FovSpec& fov,
                              double lambda, double x0, double y0,
                              const TriangulationOptions& opts) {
  if (!(lambda >= 0.0 && lambda < kPi / 3.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must lie in [0, pi/3)");
  }
  const Altitude alt = AltitudeForRadius(radius, fov);
  if (!(alt.radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero footprint radius");
  const double r = alt.radius;
  const double s = TriangleSide(r);
  const Vec2 e1 = s * UnitFromAngle(lambda);
  const Vec2 e2 = s * UnitFromAngle(lambda + kPi / 3.0);
  const Vec2 o{x0, y0};

  // Lattice coordinates of the bounding box corners.
  const double det = Cross(e1, e2);
  auto coords = [&](const Vec2& p) {
    const Vec2 d = p - o;
    return Vec2{Cross(d, e2) / det, Cross(e1, d) / det};
  };
  const BoundingBox box = Bounds(region.polygon.vertices);
  double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
  for (const Vec2& c : {box.min, box.max, Vec2{box.min.x, box.max.y}, Vec2{box.max.x, box.min.y}}) {
    const Vec2 ab = coords(c);
    amin = std::min(amin, ab.x);
    amax = std::max(amax, ab.x);
    bmin = std::min(bmin, ab.y);
    bmax = std::max(bmax, ab.y);
  }
  const long i0 = static_cast<long>(std::floor(amin)) - 2;
  const long i1 = static_cast<long>(std::ceil(amax)) + 2;
  const long j0 = static_cast<long>(std::floor(bmin)) - 2;
  const long j1 = static_cast<long>(std::ceil(bmax)) + 2;
  auto vertex = [&](long i, long j) {
    return o + static_cast<double>(i) * e1 + static_cast<double>(j) * e2;
  };

  std::vector<Vec3> candidates;
  if (opts.placement == Placement::kVertices) {
    std::array<Vec2, 6> hex;
    for (long j = j0; j <= j1; ++j) {
      for (long i = i0; i <= i1; ++i) {
        const Vec2 v = vertex(i, j);
        for (int k = 0; k < 6; ++k) {
          hex[static_cast<std::size_t>(k)] = v + r * UnitFromAngle(lambda + kPi / 6.0 + k * kPi / 3.0);
        }
        if (ConvexMeetsRegion(hex, region)) candidates.push_back({v.x, v.y, alt.z});
      }
    }
  } else {
    for (long j = j0; j <= j1; ++j) {
      for (long i = i0; i <= i1; ++i) {
        const std::array<Vec2, 3> up{vertex(i, j), vertex(i + 1, j), vertex(i, j + 1)};
        const std::array<Vec2, 3> down{vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)};
        for (const auto& tri : {up, down}) {
          if (!ConvexMeetsRegion(tri, region)) continue;
          const Vec2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
          candidates.push_back({c.x, c.y, alt.z});
        }
      }
    }
  }
  if (opts.prune_step > 0.0) candidates = Prune(candidates, region, r, opts.prune_step);
  if (candidates.empty()) throw Error(ErrorCode::kEmptyRegion, "no lattice cell meets the region");

  WaypointSet ws;
  ws.points = std::move(candidates);
  ws.coverage_radius = r;
  ws.side = s;
  ws.lambda = lambda;
  ws.x0 = x0;
  ws.y0 = y0;
  ws.altitude_clipped = alt.clipped;
  return ws;
}

void RaiseOverTerrain(WaypointSet& ws, const Region& region, const FovSpec& fov, double step) {
  if (!region.heightmap) return;
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sample step must be positive");
  const double r = ws.coverage_radius;
  const double lift = r / std::tan(0.5 * fov.theta);
  const int n = static_cast<int>(std::ceil(r / step));
  for (Vec3& w : ws.points) {
    double top = region.GroundAt(w.Xy());
    for (int j = -n; j <= n; ++j) {
      for (int i = -n; i <= n; ++i) {
        const Vec2 d{i * step, j * step};
        if (Dot(d, d) <= r * r) top = std::max(top, region.GroundAt(w.Xy() + d));
      }
    }
    w.z = std::min(top + lift, fov.z_max);
  }
}

SearchResult MinimalWaypointSearch(const Region& region, double radius, const FovSpec& fov,
                                   const TriangulationOptions& opts) {
  const double r = AltitudeForRadius(radius, fov).radius;
  const double s = TriangleSide(r);
  const double h = 0.5 * std::sqrt(3.0) * s;
  const double step = 0.25 * r;
  const int nu = static_cast<int>(std::ceil(s / step - 1e-9));
  const int nv = static_cast<int>(std::ceil(h / step - 1e-9));
  SearchResult result;
  bool have = false;
  for (int l = 0; l < 16; ++l) {
    const double lambda = l * (kPi / 3.0) / 16.0;
    for (int b = 0; b < nv; ++b) {
      for (int a = 0; a < nu; ++a) {
        // Anchor inside one fundamental domain of the rotated lattice.
        const Vec2 anchor = Rotate(Vec2{a * step, b * step}, lambda);
        WaypointSet ws = TriangulateRegion(region, radius, fov, lambda, anchor.x, anchor.y, opts);
        ++result.evaluated;
        if (!have || ws.points.size() < result.best.points.size()) {
          result.best = std::move(ws);
          have = true;
        }
      }
    }
  }
  return result;
}

std::vector<Vec2> RegionSamples(const Region& region, double step) {
  return BuildGrid(region, step).points;
}

CoverageReport CheckFullCoverage(const WaypointSet& ws, const Region& region, double step) {
  const std::vector<Vec2> samples = RegionSamples(region, step);
  CoverageReport rep;
  rep.samples = samples.size();
  std::vector<double> sx(samples.size()), sy(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sx[i] = samples[i].x;
    sy[i] = samples[i].y;
  }
  std::vector<double> cx(ws.points.size()), cy(ws.points.size());
  for (std::size_t i = 0; i < ws.points.size(); ++i) {
    cx[i] = ws.points[i].x;
    cy[i] = ws.points[i].y;
  }
  std::vector<std::uint8_t> hit(samples.size());
  kernels::Active().cover_mask(sx.data(), sy.data(), samples.size(), cx.data(), cy.data(),
                               cx.size(), ws.coverage_radius * ws.coverage_radius, hit.data());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!hit[i]) rep.uncovered.push_back(samples[i]);
  }
  rep.full = rep.uncovered.empty();
  return rep;
}

CoverageReport CheckTerrainCoverage(const WaypointSet& ws, const Region& region,
                                    const FovSpec& fov, double step) {
  if (!region.heightmap) return CheckFullCoverage(ws, region, step);
  const std::vector<Vec2> samples = RegionSamples(region, step);
  const double t = std::tan(0.5 * fov.theta);
  CoverageReport rep;
  rep.samples = samples.size();
  for (const Vec2& s : samples) {
    const Vec3 g{s.x, s.y, region.GroundAt(s)};
    bool seen = false;
    for (const Vec3& w : ws.points) {
      const double height = w.z - g.z;
      if (!(height > 0.0) || Distance(w.Xy(), s) > height * t) continue;
      const Vec3 d = w - g;
      const int n = std::max(1, static_cast<int>(std::ceil(d.Norm())));
      bool clear = true;
      for (int k = 1; k < n && clear; ++k) {
        const Vec3 q = g + (static_cast<double>(k) / n) * d;
        clear = q.z >= region.GroundAt(q.Xy());
      }
      if (clear) {
        seen = true;
        break;
      }
    }
    if (!seen) rep.uncovered.push_back(s);
  }
  rep.full = rep.uncovered.empty();
  return rep;
}

std::vector<std::vector<std::size_t>> ClusterWaypoints(std::span<const Vec3> points, int k,
                                                       std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one cluster");
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kKTooLarge,
                std::to_string(k) + " clusters for " + std::to_string(n) + " waypoints");
  }
  const std::size_t kk = static_cast<std::size_t>(k);
  std::mt19937_64 rng(seed);
  auto d2 = [](const Vec2& a, const Vec2& b) { return Dot(a - b, a - b); };

  // k-means++ seeding.
  std::vector<Vec2> centers;
  centers.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)].Xy());
  std::vector<double> best(n);
  while (centers.size() < kk) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = 1e300;
      for (const Vec2& c : centers) best[i] = std::min(best[i], d2(points[i].Xy(), c));
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < n; ++pick) {
        u -= best[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = centers.size();
    }
    centers.push_back(points[pick].Xy());
  }

  std::vector<std::size_t> label(n, kk);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      for (std::size_t c = 1; c < kk; ++c) {
        if (d2(points[i].Xy(), centers[c]) < d2(points[i].Xy(), centers[arg])) arg = c;
      }
      if (label[i] != arg) {
        label[i] = arg;
        changed = true;
      }
    }
    std::vector<Vec2> sum(kk);
    std::vector<std::size_t> count(kk, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[label[i]] += points[i].Xy();
      ++count[label[i]];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (count[c] > 0) {
        centers[c] = sum[c] / static_cast<double>(count[c]);
        continue;
      }
      // Empty cluster: take the point farthest from its own center.
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (count[label[i]] < 2) continue;
        const double d = d2(points[i].Xy(), centers[label[i]]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      --count[label[far]];
      label[far] = c;
      count[c] = 1;
      centers[c] = points[far].Xy();
      changed = true;
    }
    if (!changed) break;
  }

  std::vector<std::vector<std::size_t>> clusters(kk);
  for (std::size_t i = 0; i < n; ++i) clusters[label[i]].push_back(i);
  std::erase_if(clusters, [](const auto& c) { return c.empty(); });
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

namespace {

struct RingItem {
  std::size_t index;
  long ring;
  double bearing;
  double dist;
};

// One spiral: rings outermost first, the first swept from `ref` in the given
// direction, each later ring reversed and started next to the last bearing.
std::vector<std::size_t> Spiral(const std::vector<RingItem>& items, long outer, double ref,
                                bool ccw) {
  std::vector<std::size_t> order;
  for (long ring = outer; ring >= 0; --ring) {
    std::vector<RingItem> band;
    for (const RingItem& it : items) {
      if (it.ring == ring) band.push_back(it);
    }
    if (band.empty()) continue;
    auto offset = [&](const RingItem& it) {
      double o = std::fmod(ccw ? it.bearing - ref : ref - it.bearing, 2.0 * kPi);
      if (o < 0.0) o += 2.0 * kPi;
      return o;
    };
    std::stable_sort(band.begin(), band.end(), [&](const RingItem& a, const RingItem& b) {
      const double oa = offset(a), ob = offset(b);
      if (oa != ob) return oa < ob;
      return a.dist > b.dist;
    });
    for (const RingItem& it : band) order.push_back(it.index);
    ref = band.back().bearing;
    ccw = !ccw;
  }
  return order;
}

}  // namespace

std::vector<std::size_t> SpiralAlternatingTour(std::span<const Vec3> points, const Vec3& start,
                                               double ring_width) {
  const std::size_t n = points.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty cluster");
  if (!(ring_width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ring width must be positive");
  Vec2 centroid;
  for (const Vec3& p : points) centroid += p.Xy();
  centroid = centroid / static_cast<double>(n);

  std::vector<RingItem> items;
  long outer = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = points[i].Xy() - centroid;
    const double dist = d.Norm();
    const long ring = static_cast<long>(std::floor(dist / ring_width + 1e-9));
    items.push_back({i, ring, std::atan2(d.y, d.x), dist});
    outer = std::max(outer, ring);
  }

  // The outer sweep may begin at any member of the outer ring, in either
  // direction; the shortest closed cycle wins, earliest candidate on ties.
  std::vector<std::size_t> best;
  double best_len = 0.0;
  for (bool ccw : {true, false}) {
    for (const RingItem& first : items) {
      if (first.ring != outer) continue;
      std::vector<std::size_t> order = Spiral(items, outer, first.bearing, ccw);
      const double len = ClosedTourLength(points, order);
      if (best.empty() || len < best_len) {
        best = std::move(order);
        best_len = len;
      }
    }
  }

  // Enter the cycle at the member nearest `start`.
  std::size_t entry = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (Distance(points[best[k]].Xy(), start.Xy()) < Distance(points[best[entry]].Xy(), start.Xy())) {
      entry = k;
    }
  }
  std::rotate(best.begin(), best.begin() + static_cast<long>(entry), best.end());
  return best;
}

std::vector<std::size_t> ClusteredTour(std::span<const Vec3> points,
                                       const std::vector<std::vector<std::size_t>>& clusters,
                                       const Vec3& start, double ring_width) {
  std::vector<bool> done(clusters.size(), false);
  std::vector<std::size_t> order;
  Vec3 at = start;
  for (std::size_t round = 0; round < clusters.size(); ++round) {
    std::size_t pick = clusters.size();
    double pick_d = 1e300;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (done[c] || clusters[c].empty()) continue;
      Vec2 centroid;
      for (std::size_t i : clusters[c]) centroid += points[i].Xy();
      centroid = centroid / static_cast<double>(clusters[c].size());
      const double d = Distance(centroid, at.Xy());
      if (d < pick_d) {
        pick_d = d;
        pick = c;
      }
    }
    if (pick == clusters.size()) break;
    done[pick] = true;
    std::vector<Vec3> sub;
    for (std::size_t i : clusters[pick]) sub.push_back(points[i]);
    for (std::size_t local : SpiralAlternatingTour(sub, at, ring_width)) {
      order.push_back(clusters[pick][local]);
    }
    at = points[order.back()];
  }
  return order;
}

double ClosedTourLength(std::span<const Vec3> points, std::span<const std::size_t> order) {
  double len = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    len += Distance(points[order[i]], points[order[(i + 1) % order.size()]]);
  }
  return len;
}

Vec3 Bezier::At(double t) const {
  const double u = 1.0 - t;
  return (u * u * u) * b0 + (3.0 * t * u * u) * b1 + (3.0 * t * t * u) * b2 + (t * t * t) * b3;
}

Vec3 Bezier::Derivative(double t) const {
  const double u = 1.0 - t;
  return 3.0 * ((u * u) * (b1 - b0) + (2.0 * t * u) * (b2 - b1) + (t * t) * (b3 - b2));
}

Vec3 Bezier::SecondDerivative(double t) const {
  return 6.0 * ((1.0 - t) * (b2 - 2.0 * b1 + b0) + t * (b3 - 2.0 * b2 + b1));
}

double MinTurnRadius(const Bezier& b, int samples) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const Vec3 d1 = b.Derivative(t);
    const double speed = d1.Norm();
    if (speed == 0.0) return 0.0;
    const double bend = Cross(d1, b.SecondDerivative(t)).Norm();
    if (bend > 0.0) best = std::min(best, speed * speed * speed / bend);
  }
  return best;
}

SmoothPath SmoothTour(std::span<const Vec3> ordered, double delta, double min_turn_radius) {
  const std::size_t n = ordered.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two waypoints");
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be >= 0");

  // Visit points: each waypoint moves toward the chord of its neighbours,
  // at most delta, using already-moved predecessors.
  std::vector<Vec3> p(ordered.begin(), ordered.end());
  for (std::size_t i = 0; i < n && delta > 0.0; ++i) {
    const Vec3& a = p[(i + n - 1) % n];
    const Vec3& b = p[(i + 1) % n];
    const Vec3 ab = b - a;
    const double len2 = Dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(Dot(ordered[i] - a, ab) / len2, 0.0, 1.0) : 0.0;
    const Vec3 cut = (a + t * ab) - ordered[i];
    const double d = cut.Norm();
    if (d > 0.0) p[i] = ordered[i] + std::min(1.0, delta / d) * cut;
  }

  std::vector<Vec3> tangent(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 next = p[(i + 1) % n];
    const Vec3 prev = p[(i + n - 1) % n];
    if ((next - p[i]).Norm() == 0.0) {
      throw Error(ErrorCode::kCoincidentPoints, "consecutive visit points coincide");
    }
    // Bisector of the unit legs, so a short leg next to a long one does not
    // tip the tangent into a hairpin.
    Vec3 t = (next - p[i]).Normalized() + (p[i] - prev).Normalized();
    if (t.Norm() <= 1e-12) {
      const Vec3 leg = next - p[i];
      t = {-leg.y, leg.x, 0.0};
      if (t.Norm() == 0.0) t = Cross(leg, Vec3{1.0, 0.0, 0.0});
    }
    tangent[i] = t.Normalized();
  }

  SmoothPath path;
  path.visit_points = p;
  path.closed = true;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double len = Distance(p[i], p[j]);
    auto make = [&](double h0, double h1) {
      return Bezier{p[i], p[i] + h0 * tangent[i], p[j] - h1 * tangent[j], p[j]};
    };
    // Hill climb on the two handle lengths, maximizing the smallest radius.
    double h0 = len / 3.0, h1 = len / 3.0;
    Bezier seg = make(h0, h1);
    double radius = min_turn_radius > 0.0 ? MinTurnRadius(seg) : 0.0;
    for (int iter = 0; iter < 20 && radius < min_turn_radius; ++iter) {
      double best = radius, b0 = h0, b1 = h1;
      for (double f : {1.5, 1.0 / 1.5}) {
        for (const auto& [c0, c1] : {std::pair{h0 * f, h1}, std::pair{h0, h1 * f}, std::pair{h0 * f, h1 * f}}) {
          const double rc = MinTurnRadius(make(c0, c1));
          if (rc > best) {
            best = rc;
            b0 = c0;
            b1 = c1;
          }
        }
      }
      if (best <= radius) break;
      h0 = b0;
      h1 = b1;
      radius = best;
      seg = make(h0, h1);
    }
    if (radius < min_turn_radius) {
      throw Error(ErrorCode::kInfeasibleCurvature,
                  "segment " + std::to_string(i) + " reaches turn radius " +
                      std::to_string(radius) + " < " + std::to_string(min_turn_radius));
    }
    path.segments.push_back(seg);
  }
  return path;
}

double PathLength(const SmoothPath& path, int samples_per_segment) {
  // Composite Simpson on the speed.
  const int m = samples_per_segment + samples_per_segment % 2;
  double total = 0.0;
  for (const Bezier& b : path.segments) {
    double acc = b.Derivative(0.0).Norm() + b.Derivative(1.0).Norm();
    for (int k = 1; k < m; ++k) {
      acc += (k % 2 ? 4.0 : 2.0) * b.Derivative(static_cast<double>(k) / m).Norm();
    }
    total += acc / (3.0 * m);
  }
  return total;
}

JoinResiduals JoinResidualsOf(const SmoothPath& path) {
  JoinResiduals r;
  const std::size_t n = path.segments.size();
  const std::size_t joins = path.closed ? n : (n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k < joins; ++k) {
    const Bezier& a = path.segments[k];
    const Bezier& b = path.segments[(k + 1) % n];
    r.c0 = std::max(r.c0, Distance(a.b3, b.b0));
    const Vec3 ua = (a.b3 - a.b2).Normalized();
    const Vec3 ub = (b.b1 - b.b0).Normalized();
    r.c1 = std::max(r.c1, (ua - ub).Norm());
  }
  return r;
}

MarginReport CheckSafetyMargins(const WaypointSet& ws, const Region& region, double delta,
                                double c1, double c2) {
  MarginReport rep;
  if (!(delta > 0.0 && c1 > 2.0 * delta)) rep.violations.push_back({"side-condition", 0, 0, c1, 2.0 * delta});
  if (!(delta > 0.0 && c2 > delta)) rep.violations.push_back({"side-condition", 1, 1, c2, delta});
  const auto& pts = ws.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = Distance(pts[i], pts[j]);
      if (d < c1) rep.violations.push_back({"separation", i, j, d, c1});
    }
    const double clearance = pts[i].z - region.GroundAt(pts[i].Xy());
    if (clearance < c2) rep.violations.push_back({"clearance", i, i, clearance, c2});
  }
  return rep;
}

void RenderCoverageSvg(const Region& region, const WaypointSet& ws, const SmoothPath* path,
                       std::ostream& out) {
  BoundingBox box = Bounds(region.polygon.vertices);
  const double pad = ws.coverage_radius;
  box.min -= Vec2{pad, pad};
  box.max += Vec2{pad, pad};
  const double span = std::max(box.max.x - box.min.x, box.max.y - box.min.y);
  const double scale = 600.0 / span;
  auto px = [&](const Vec2& p) {
    return FormatDouble((p.x - box.min.x) * scale) + "," + FormatDouble((box.max.y - p.y) * scale);
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\">\n";
  out << "<polygon fill=\"#eef5e8\" stroke=\"black\" points=\"";
  for (const Vec2& v : region.polygon.vertices) out << px(v) << ' ';
  out << "\"/>\n";
  for (const Vec3& w : ws.points) {
    const std::string c = px(w.Xy());
    const std::size_t comma = c.find(',');
    out << "<circle cx=\"" << c.substr(0, comma) << "\" cy=\"" << c.substr(comma + 1)
        << "\" r=\"" << FormatDouble(ws.coverage_radius * scale)
        << "\" fill=\"none\" stroke=\"#7aa6d6\" stroke-width=\"0.5\"/>\n";
    out << "<circle cx=\"" << c.substr(0, comma) << "\" cy=\"" << c.substr(comma + 1)
        << "\" r=\"2\" fill=\"#1f4e8c\"/>\n";
  }
  if (path) {
    out << "<polyline fill=\"none\" stroke=\"#c0392b\" points=\"";
    for (const Bezier& b : path->segments) {
      for (int k = 0; k <= 32; ++k) out << px(b.At(k / 32.0).Xy()) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void WriteWaypointsCsv(const WaypointSet& ws, std::ostream& out) {
  out << "x,y,z\n";
  for (const Vec3& p : ws.points) {
    out << FormatDouble(p.x) << ',' << FormatDouble(p.y) << ',' << FormatDouble(p.z) << '\n';
  }
}

void WritePathCsv(const SmoothPath& path, double step, std::ostream& out) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "path step must lie in (0, 1]");
  }
  out << "t,x,y,z\n";
  const int per = static_cast<int>(std::ceil(1.0 / step - 1e-9));
  for (std::size_t s = 0; s < path.segments.size(); ++s) {
    const bool last = s + 1 == path.segments.size();
    for (int k = 0; k < per + (last ? 1 : 0); ++k) {
      const double t = std::min(1.0, k * step);
      const Vec3 q = path.segments[s].At(t);
      out << FormatDouble(static_cast<double>(s) + t) << ',' << FormatDouble(q.x) << ','
          << FormatDouble(q.y) << ',' << FormatDouble(q.z) << '\n';
    }
  }
}

CoveragePlan PlanCoverage(const CoverageTask& task, const PlanSettings& settings) {
  if (!(task.radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  TriangulationOptions topt;
  topt.prune_step = settings.sample_step;
  CoveragePlan plan;
  if (settings.search || !task.lambda) {
    plan.waypoints = MinimalWaypointSearch(task.region, task.radius, task.fov, topt).best;
  } else {
    plan.waypoints = TriangulateRegion(task.region, task.radius, task.fov, *task.lambda, task.x0,
                                       task.y0, topt);
  }
  WaypointSet& ws = plan.waypoints;
  RaiseOverTerrain(ws, task.region, task.fov, settings.sample_step);
  plan.coverage = task.region.heightmap
                      ? CheckTerrainCoverage(ws, task.region, task.fov, settings.sample_step)
                      : CheckFullCoverage(ws, task.region, settings.sample_step);
  plan.delta = task.delta.value_or(0.25 * ws.coverage_radius);
  plan.clusters = ClusterWaypoints(ws.points, task.clusters, task.seed);
  plan.order = ClusteredTour(ws.points, plan.clusters, ws.points.front(), ws.side);
  if (plan.order.size() >= 2) {
    std::vector<Vec3> ordered;
    ordered.reserve(plan.order.size());
    for (std::size_t i : plan.order) ordered.push_back(ws.points[i]);
    plan.path = SmoothTour(ordered, plan.delta, task.min_turn_radius);
  }
  if (task.c1 > 0.0 || task.c2 > 0.0) {
    plan.margins = CheckSafetyMargins(ws, task.region, plan.delta, task.c1, task.c2);
  }
  return plan;
}

}  // namespace navkit
