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
#include <limits>

#include "navkit/kernels/kernels.hpp"
#include "kernels/variants.hpp"

namespace navkit::kernels::scalar {

void SegmentDistances(double px, double py, const double* xs, const double* ys,
                      std::size_t n, double* out_d2, double* out_t) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i + 1] - xs[i];
    const double dy = ys[i + 1] - ys[i];
    const double wx = px - xs[i];
    const double wy = py - ys[i];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::max(0.0, std::min(1.0, (wx * dx + wy * dy) / len2));
    const double ex = px - (xs[i] + t * dx);
    const double ey = py - (ys[i] + t * dy);
    out_d2[i] = ex * ex + ey * ey;
    out_t[i] = t;
  }
}

NearestResult NearestPoint2d(double qx, double qy, const double* xs, const double* ys,
                             std::size_t n) {
  NearestResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best.squared_distance) best = {i, d2};
  }
  return best;
}

NearestResult NearestPoint3d(double qx, double qy, double qz, const double* xs,
                             const double* ys, const double* zs, std::size_t n) {
  NearestResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best.squared_distance) best = {i, d2};
  }
  return best;
}

void CoverMask(const double* sx, const double* sy, std::size_t n, const double* cx,
               const double* cy, std::size_t m, double r2, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t hit = 0;
    for (std::size_t j = 0; j < m && !hit; ++j) {
      const double dx = sx[i] - cx[j];
      const double dy = sy[i] - cy[j];
      hit = (dx * dx + dy * dy) <= r2;
    }
    out[i] = hit;
  }
}

void PointsInPolygon(const double* px, const double* py, std::size_t n,
                     const double* polyx, const double* polyy, std::size_t nv,
                     std::uint8_t* out) {
  for (std::size_t k = 0; k < n; ++k) {
    bool inside = false;
    for (std::size_t i = 0, j = nv - 1; i < nv; j = i++) {
      const bool straddles = (polyy[i] > py[k]) != (polyy[j] > py[k]);
      if (straddles &&
          px[k] < (polyx[j] - polyx[i]) * (py[k] - polyy[i]) / (polyy[j] - polyy[i]) +
                      polyx[i]) {
        inside = !inside;
      }
    }
    out[k] = inside;
  }
}

void Gemv(std::size_t rows, std::size_t cols, const double* w, const double* x,
          const double* b, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    out[r] = acc + b[r];
  }
}

}  // namespace navkit::kernels::scalar

namespace navkit::kernels {

const KernelTable& ScalarKernels() {
  static const KernelTable table{
      "scalar",
      &scalar::SegmentDistances,
      &scalar::NearestPoint2d,
      &scalar::NearestPoint3d,
      &scalar::CoverMask,
      &scalar::PointsInPolygon,
      &scalar::Gemv,
  };
  return table;
}

}  // namespace navkit::kernels
