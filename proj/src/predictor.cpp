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

#include "navkit/predictor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "navkit/error.hpp"

namespace navkit {
namespace {

// Equilibrated reciprocal condition below which an order is rank deficient.
constexpr double kSingularRcond = 1e-12;
// Residual variance floor relative to the signal's mean square; keeps the
// criterion finite for exact fits.
constexpr double kVarianceFloor = 1e-24;

struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Rows t = max_order .. n-1: [1, x_{t-1}, ..., x_{t-order}] -> x_t.
Design BuildDesign(std::span<const double> series, int order, int max_order) {
  const auto n = static_cast<Eigen::Index>(series.size());
  const Eigen::Index rows = n - max_order;
  Design d{Eigen::MatrixXd(rows, order + 1), Eigen::VectorXd(rows)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = r + max_order;
    d.x(r, 0) = 1.0;
    for (int i = 1; i <= order; ++i) d.x(r, i) = series[static_cast<std::size_t>(t - i)];
    d.y(r) = series[static_cast<std::size_t>(t)];
  }
  return d;
}

struct OrderFit {
  bool ok = false;
  Eigen::VectorXd beta;
  double rss = 0.0;
};

OrderFit SolveNormalEquations(const Design& d) {
  const Eigen::MatrixXd a = d.x.transpose() * d.x;
  const Eigen::VectorXd b = d.x.transpose() * d.y;
  Eigen::VectorXd scale = a.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    if (scale(i) == 0.0) return {};
    scale(i) = 1.0 / scale(i);
  }
  const Eigen::MatrixXd scaled = scale.asDiagonal() * a * scale.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < kSingularRcond) return {};
  OrderFit fit;
  fit.beta = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * b);
  fit.rss = (d.y - d.x * fit.beta).squaredNorm();
  fit.ok = fit.beta.allFinite();
  return fit;
}

}  // namespace

ArModel FitAr(std::span<const double> series, int max_order) {
  if (max_order < 1) throw Error(ErrorCode::kInvalidArgument, "max_order must be >= 1");
  const std::size_t needed = 2 * static_cast<std::size_t>(max_order) + 2;
  if (series.size() < needed) {
    throw Error(ErrorCode::kSeriesTooShort, "need " + std::to_string(needed) +
                                                " samples, got " + std::to_string(series.size()));
  }
  const double m = static_cast<double>(series.size()) - max_order;
  const double mean_square =
      std::inner_product(series.begin(), series.end(), series.begin(), 0.0) /
      static_cast<double>(series.size());
  const double floor = kVarianceFloor * mean_square + std::numeric_limits<double>::min();

  ArModel best;
  double best_aicc = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= max_order; ++p) {
    const double k = p + 1.0;
    if (m - k - 1.0 <= 0.0) continue;
    const OrderFit fit = SolveNormalEquations(BuildDesign(series, p, max_order));
    if (!fit.ok) continue;
    const double variance = std::max(fit.rss / m, floor);
    const double aicc = m * std::log(variance) + 2.0 * k + 2.0 * k * (k + 1.0) / (m - k - 1.0);
    if (aicc < best_aicc) {
      best_aicc = aicc;
      best.order = p;
      best.intercept = fit.beta(0);
      best.coefficients.assign(fit.beta.data() + 1, fit.beta.data() + 1 + p);
      best.residual_variance = fit.rss / m;
    }
  }
  if (std::isfinite(best_aicc)) return best;

  // Every order is rank deficient: the series carries no usable lag signal.
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) /
                      static_cast<double>(series.size());
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  ArModel fallback;
  fallback.order = 1;
  fallback.coefficients = {0.0};
  fallback.intercept = mean;
  fallback.residual_variance = ss / static_cast<double>(series.size());
  return fallback;
}

double PredictNext(const ArModel& model, std::span<const double> history) {
  if (history.size() < static_cast<std::size_t>(model.order)) {
    throw Error(ErrorCode::kHistoryTooShort, "history shorter than model order");
  }
  double value = model.intercept;
  const std::size_t n = history.size();
  for (int i = 0; i < model.order; ++i) {
    value += model.coefficients[static_cast<std::size_t>(i)] * history[n - 1 - static_cast<std::size_t>(i)];
  }
  return value;
}

double NormalEquationResidual(std::span<const double> series, const ArModel& model,
                              int max_order) {
  const Design d = BuildDesign(series, model.order, max_order);
  Eigen::VectorXd beta(model.order + 1);
  beta(0) = model.intercept;
  for (int i = 0; i < model.order; ++i) beta(i + 1) = model.coefficients[static_cast<std::size_t>(i)];
  return (d.x.transpose() * (d.y - d.x * beta)).cwiseAbs().maxCoeff();
}

std::size_t MinimumHistory(const ArOptions& options) {
  return 2 * static_cast<std::size_t>(options.max_order) + 2;
}

namespace {

template <typename Getter>
double PredictComponent(std::size_t begin, std::size_t end, Getter get, int max_order) {
  std::vector<double> series;
  series.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) series.push_back(get(i));
  return PredictNext(FitAr(series, max_order), series);
}

}  // namespace

Vec3 PredictVelocity3(std::span<const Vec3> history, const ArOptions& options) {
  const std::size_t window = std::max<std::size_t>(static_cast<std::size_t>(options.window),
                                                   MinimumHistory(options));
  const std::size_t end = history.size();
  const std::size_t begin = end > window ? end - window : 0;
  return {PredictComponent(begin, end, [&](std::size_t i) { return history[i].x; }, options.max_order),
          PredictComponent(begin, end, [&](std::size_t i) { return history[i].y; }, options.max_order),
          PredictComponent(begin, end, [&](std::size_t i) { return history[i].z; }, options.max_order)};
}

Vec2 PredictVelocity2(std::span<const Vec2> history, const ArOptions& options) {
  std::vector<Vec3> lifted;
  lifted.reserve(history.size());
  for (const Vec2& v : history) lifted.push_back({v.x, v.y, 0.0});
  return PredictVelocity3(lifted, options).Xy();
}

}  // namespace navkit
