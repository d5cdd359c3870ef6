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

// Data-parallel inner loops shared by the planners and the coverage oracle.
//
// Every kernel exists as a portable scalar reference and, on x86-64, an AVX2
// variant. The variant is chosen once at runtime from CPUID; setting the
// environment variable NAVKIT_SIMD=scalar forces the reference path.
//
// Comparison kernels (distances, coverage, containment) are bitwise
// identical across variants: both evaluate the same expression tree without
// contraction. Only Gemv reassociates its sum and is equal to tolerance.

#include <cstddef>
#include <cstdint>

namespace navkit::kernels {

struct NearestResult {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

struct KernelTable {
  const char* name;

  // Squared distance from (px, py) to each segment (xs[i], ys[i]) ->
  // (xs[i+1], ys[i+1]) for i < n, plus the clamped segment parameter.
  // xs and ys hold n + 1 entries.
  void (*segment_distances)(double px, double py, const double* xs, const double* ys,
                            std::size_t n, double* out_d2, double* out_t);

  // Lowest index attaining the minimum squared distance; n > 0.
  NearestResult (*nearest_point_2d)(double qx, double qy, const double* xs,
                                    const double* ys, std::size_t n);
  NearestResult (*nearest_point_3d)(double qx, double qy, double qz, const double* xs,
                                    const double* ys, const double* zs, std::size_t n);

  // out[i] = 1 when sample i lies within sqrt(r2) of any disc center.
  void (*cover_mask)(const double* sx, const double* sy, std::size_t n, const double* cx,
                     const double* cy, std::size_t m, double r2, std::uint8_t* out);

  // Even-odd containment of each point in the closed polygon given by nv
  // vertices (polyx/polyy hold nv entries; the last edge closes the ring).
  void (*points_in_polygon)(const double* px, const double* py, std::size_t n,
                            const double* polyx, const double* polyy, std::size_t nv,
                            std::uint8_t* out);

  // out = W * x + b, W row-major rows x cols.
  void (*gemv)(std::size_t rows, std::size_t cols, const double* w, const double* x,
               const double* b, double* out);
};

const KernelTable& ScalarKernels();

// nullptr when not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* Avx2Kernels();

// The table used by the library.
const KernelTable& Active();

}  // namespace navkit::kernels
