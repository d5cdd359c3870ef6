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

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "kernels/variants.hpp"

namespace navkit::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Lane-wise running minimum with first-occurrence indices, reduced so that
// the lowest global index among equal minima wins (matches the scalar scan).
struct LaneMin {
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d best_idx = _mm256_setzero_pd();

  void Update(__m256d d2, __m256d idx) {
    const __m256d better = _mm256_cmp_pd(d2, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, d2, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
  }

  NearestResult Reduce() const {
    alignas(32) double d[kLanes];
    alignas(32) double ix[kLanes];
    _mm256_store_pd(d, best);
    _mm256_store_pd(ix, best_idx);
    NearestResult r{0, std::numeric_limits<double>::infinity()};
    for (std::size_t l = 0; l < kLanes; ++l) {
      const auto idx = static_cast<std::size_t>(ix[l]);
      if (d[l] < r.squared_distance ||
          (d[l] == r.squared_distance && idx < r.index)) {
        r = {idx, d[l]};
      }
    }
    return r;
  }
};

}  // namespace

void SegmentDistances(double px, double py, const double* xs, const double* ys,
                      std::size_t n, double* out_d2, double* out_t) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d ax = _mm256_loadu_pd(xs + i);
    const __m256d ay = _mm256_loadu_pd(ys + i);
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i + 1), ax);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i + 1), ay);
    const __m256d wx = _mm256_sub_pd(vpx, ax);
    const __m256d wy = _mm256_sub_pd(vpy, ay);
    const __m256d len2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d dot = _mm256_add_pd(_mm256_mul_pd(wx, dx), _mm256_mul_pd(wy, dy));
    __m256d t = _mm256_max_pd(zero, _mm256_min_pd(one, _mm256_div_pd(dot, len2)));
    t = _mm256_blendv_pd(zero, t, _mm256_cmp_pd(len2, zero, _CMP_GT_OQ));
    const __m256d ex = _mm256_sub_pd(vpx, _mm256_add_pd(ax, _mm256_mul_pd(t, dx)));
    const __m256d ey = _mm256_sub_pd(vpy, _mm256_add_pd(ay, _mm256_mul_pd(t, dy)));
    _mm256_storeu_pd(out_d2 + i, _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
    _mm256_storeu_pd(out_t + i, t);
  }
  if (i < n) {
    ScalarKernels().segment_distances(px, py, xs + i, ys + i, n - i, out_d2 + i, out_t + i);
  }
}

NearestResult NearestPoint2d(double qx, double qy, const double* xs, const double* ys,
                             std::size_t n) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  LaneMin lanes;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    lanes.Update(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), idx);
    idx = _mm256_add_pd(idx, step);
  }
  NearestResult r = lanes.Reduce();
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double d2 = dx * dx + dy * dy;
    if (d2 < r.squared_distance) r = {i, d2};
  }
  return r;
}

NearestResult NearestPoint3d(double qx, double qy, double qz, const double* xs,
                             const double* ys, const double* zs, std::size_t n) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  LaneMin lanes;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    lanes.Update(d2, idx);
    idx = _mm256_add_pd(idx, step);
  }
  NearestResult r = lanes.Reduce();
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < r.squared_distance) r = {i, d2};
  }
  return r;
}

void CoverMask(const double* sx, const double* sy, std::size_t n, const double* cx,
               const double* cy, std::size_t m, double r2, std::uint8_t* out) {
  const __m256d vr2 = _mm256_set1_pd(r2);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(sx + i);
    const __m256d y = _mm256_loadu_pd(sy + i);
    __m256d hit = _mm256_setzero_pd();
    for (std::size_t j = 0; j < m; ++j) {
      const __m256d dx = _mm256_sub_pd(x, _mm256_set1_pd(cx[j]));
      const __m256d dy = _mm256_sub_pd(y, _mm256_set1_pd(cy[j]));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      hit = _mm256_or_pd(hit, _mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
      if (_mm256_movemask_pd(hit) == 0xF) break;
    }
    const int bits = _mm256_movemask_pd(hit);
    for (std::size_t l = 0; l < kLanes; ++l) out[i + l] = (bits >> l) & 1;
  }
  if (i < n) ScalarKernels().cover_mask(sx + i, sy + i, n - i, cx, cy, m, r2, out + i);
}

void PointsInPolygon(const double* px, const double* py, std::size_t n,
                     const double* polyx, const double* polyy, std::size_t nv,
                     std::uint8_t* out) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d x = _mm256_loadu_pd(px + k);
    const __m256d y = _mm256_loadu_pd(py + k);
    __m256d inside = _mm256_setzero_pd();
    for (std::size_t i = 0, j = nv - 1; i < nv; j = i++) {
      const __m256d yi = _mm256_set1_pd(polyy[i]);
      const __m256d yj = _mm256_set1_pd(polyy[j]);
      const __m256d above_i = _mm256_cmp_pd(yi, y, _CMP_GT_OQ);
      const __m256d above_j = _mm256_cmp_pd(yj, y, _CMP_GT_OQ);
      const __m256d straddles = _mm256_xor_pd(above_i, above_j);
      if (_mm256_movemask_pd(straddles) == 0) continue;
      const __m256d xi = _mm256_set1_pd(polyx[i]);
      const __m256d xj = _mm256_set1_pd(polyx[j]);
      const __m256d cross_x = _mm256_add_pd(
          _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(xj, xi), _mm256_sub_pd(y, yi)),
                        _mm256_sub_pd(yj, yi)),
          xi);
      const __m256d left = _mm256_cmp_pd(x, cross_x, _CMP_LT_OQ);
      inside = _mm256_xor_pd(inside, _mm256_and_pd(straddles, left));
    }
    const int bits = _mm256_movemask_pd(inside);
    for (std::size_t l = 0; l < kLanes; ++l) out[k + l] = (bits >> l) & 1;
  }
  if (k < n) {
    ScalarKernels().points_in_polygon(px + k, py + k, n - k, polyx, polyy, nv, out + k);
  }
}

void Gemv(std::size_t rows, std::size_t cols, const double* w, const double* x,
          const double* b, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + kLanes <= cols; c += kLanes) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
    }
    double sum = HorizontalSum(acc);
    for (; c < cols; ++c) sum += row[c] * x[c];
    out[r] = sum + b[r];
  }
}

}  // namespace navkit::kernels::avx2

namespace navkit::kernels {

const KernelTable& Avx2Table() {
  static const KernelTable table{
      "avx2",
      &avx2::SegmentDistances,
      &avx2::NearestPoint2d,
      &avx2::NearestPoint3d,
      &avx2::CoverMask,
      &avx2::PointsInPolygon,
      &avx2::Gemv,
  };
  return table;
}

}  // namespace navkit::kernels
