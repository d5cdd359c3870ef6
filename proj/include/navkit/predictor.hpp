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

#include <span>
#include <vector>

#include "navkit/vec.hpp"

namespace navkit {

// x_t = intercept + sum_i coefficients[i] * x_{t-1-i}
struct ArModel {
  int order = 1;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double residual_variance = 0.0;
};

struct ArOptions {
  int max_order = 4;
  int window = 20;  // most recent samples used by the vector helpers
};

// Fits orders 1..max_order by least squares on a common effective sample and
// keeps the one with the smallest corrected Akaike criterion. Rank-deficient
// orders are skipped; if every order is rank deficient the series is treated
// as constant (order 1, zero coefficient, intercept = mean).
// Throws kSeriesTooShort when series.size() < 2 * max_order + 2.
ArModel FitAr(std::span<const double> series, int max_order);

// Throws kHistoryTooShort when history.size() < model.order.
double PredictNext(const ArModel& model, std::span<const double> history);

// Largest |X^T (y - X beta)| entry of the fitted model's normal equations on
// the sample FitAr used for it.
double NormalEquationResidual(std::span<const double> series, const ArModel& model,
                              int max_order);

// Componentwise fit-and-predict over the last options.window samples.
Vec3 PredictVelocity3(std::span<const Vec3> history, const ArOptions& options = {});
Vec2 PredictVelocity2(std::span<const Vec2> history, const ArOptions& options = {});

// Shortest history PredictVelocity3 accepts for the given options.
std::size_t MinimumHistory(const ArOptions& options);

}  // namespace navkit
