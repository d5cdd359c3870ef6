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

#include "navkit/bpnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "navkit/error.hpp"
#include "navkit/kernels/kernels.hpp"

namespace navkit {
namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void CheckShapes(const Mlp& net, std::size_t in, std::size_t out) {
  if (net.sizes.size() < 2 || net.weights.size() + 1 != net.sizes.size() ||
      net.biases.size() + 1 != net.sizes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "malformed network");
  }
  if (in != static_cast<std::size_t>(net.sizes.front())) {
    throw Error(ErrorCode::kInvalidArgument, "input has " + std::to_string(in) + " entries, network expects " +
                                                 std::to_string(net.sizes.front()));
  }
  if (out != 0 && out != static_cast<std::size_t>(net.sizes.back())) {
    throw Error(ErrorCode::kInvalidArgument, "target size does not match the output layer");
  }
}

// Activations of every layer, input first.
std::vector<std::vector<double>> ForwardAll(const Mlp& net, std::span<const double> input) {
  const kernels::KernelTable& k = kernels::Active();
  std::vector<std::vector<double>> acts;
  acts.reserve(net.sizes.size());
  acts.emplace_back(input.begin(), input.end());
  const std::size_t layers = net.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = net.sizes[l + 1];
    const std::size_t cols = net.sizes[l];
    std::vector<double> z(rows);
    k.gemv(rows, cols, net.weights[l].data(), acts.back().data(), net.biases[l].data(), z.data());
    if (l + 1 < layers) {
      for (double& v : z) v = Sigmoid(v);
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

// Backpropagates an output-layer error derivative dL/dy into `grad`
// (accumulating, scaled by `weight`).
void Accumulate(const Mlp& net, const std::vector<std::vector<double>>& acts, std::vector<double> delta,
                double weight, Gradients& grad) {
  for (std::size_t l = net.weights.size(); l-- > 0;) {
    const std::size_t rows = net.sizes[l + 1];
    const std::size_t cols = net.sizes[l];
    const std::vector<double>& a = acts[l];
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = delta[r] * weight;
      grad.biases[l][r] += d;
      double* gw = grad.weights[l].data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) gw[c] += d * a[c];
    }
    if (l == 0) break;
    std::vector<double> prev(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* w = net.weights[l].data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) prev[c] += w[c] * delta[r];
    }
    for (std::size_t c = 0; c < cols; ++c) prev[c] *= a[c] * (1.0 - a[c]);
    delta = std::move(prev);
  }
}

Gradients ZeroGradients(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

struct Standardizer {
  std::vector<double> in_mean, in_scale, out_mean, out_scale;
};

std::vector<double> Input(const Sample& s) { return {s.readings.begin(), s.readings.end()}; }

Standardizer Fit(const std::vector<const Sample*>& train) {
  Standardizer st;
  st.in_mean.assign(kSensorCount, 0.0);
  st.in_scale.assign(kSensorCount, 0.0);
  st.out_mean.assign(2, 0.0);
  st.out_scale.assign(2, 0.0);
  const double n = static_cast<double>(train.size());
  for (const Sample* s : train) {
    for (int i = 0; i < kSensorCount; ++i) st.in_mean[i] += s->readings[i] / n;
    const auto t = Targets(*s);
    for (int k = 0; k < 2; ++k) st.out_mean[k] += t[k] / n;
  }
  for (const Sample* s : train) {
    for (int i = 0; i < kSensorCount; ++i) {
      st.in_scale[i] += (s->readings[i] - st.in_mean[i]) * (s->readings[i] - st.in_mean[i]) / n;
    }
    const auto t = Targets(*s);
    for (int k = 0; k < 2; ++k) st.out_scale[k] += (t[k] - st.out_mean[k]) * (t[k] - st.out_mean[k]) / n;
  }
  for (double& v : st.in_scale) v = v > 1e-24 ? std::sqrt(v) : 1.0;
  for (double& v : st.out_scale) v = v > 1e-24 ? std::sqrt(v) : 1.0;
  return st;
}

// Raw-unit network -> network on standardized inputs and outputs.
Mlp Unfold(Mlp net, const Standardizer& st) {
  const std::size_t last = net.weights.size() - 1;
  const std::size_t cols0 = net.sizes[0];
  for (std::size_t r = 0; r < static_cast<std::size_t>(net.sizes[1]); ++r) {
    double* w = net.weights[0].data() + r * cols0;
    for (std::size_t c = 0; c < cols0; ++c) {
      net.biases[0][r] += w[c] * st.in_mean[c];
      w[c] *= st.in_scale[c];
    }
  }
  const std::size_t colsl = net.sizes[last];
  for (std::size_t r = 0; r < static_cast<std::size_t>(net.sizes[last + 1]); ++r) {
    double* w = net.weights[last].data() + r * colsl;
    for (std::size_t c = 0; c < colsl; ++c) w[c] /= st.out_scale[r];
    net.biases[last][r] = (net.biases[last][r] - st.out_mean[r]) / st.out_scale[r];
  }
  return net;
}

Mlp Fold(Mlp net, const Standardizer& st) {
  const std::size_t last = net.weights.size() - 1;
  const std::size_t colsl = net.sizes[last];
  for (std::size_t r = 0; r < static_cast<std::size_t>(net.sizes[last + 1]); ++r) {
    double* w = net.weights[last].data() + r * colsl;
    for (std::size_t c = 0; c < colsl; ++c) w[c] *= st.out_scale[r];
    net.biases[last][r] = net.biases[last][r] * st.out_scale[r] + st.out_mean[r];
  }
  const std::size_t cols0 = net.sizes[0];
  for (std::size_t r = 0; r < static_cast<std::size_t>(net.sizes[1]); ++r) {
    double* w = net.weights[0].data() + r * cols0;
    for (std::size_t c = 0; c < cols0; ++c) {
      w[c] /= st.in_scale[c];
      net.biases[0][r] -= w[c] * st.in_mean[c];
    }
  }
  return net;
}

struct Prepared {
  std::vector<std::vector<double>> x;  // standardized
  std::vector<std::array<double, 2>> t;  // raw targets
};

Prepared Prepare(const std::vector<const Sample*>& set, const Standardizer& st) {
  Prepared p;
  for (const Sample* s : set) {
    std::vector<double> x(kSensorCount);
    for (int i = 0; i < kSensorCount; ++i) x[i] = (s->readings[i] - st.in_mean[i]) / st.in_scale[i];
    p.x.push_back(std::move(x));
    p.t.push_back(Targets(*s));
  }
  return p;
}

// Training objective: MSE of the standardized outputs.
double SetMse(const Mlp& net, const Prepared& p, const Standardizer& st) {
  if (p.x.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const auto acts = ForwardAll(net, p.x[i]);
    const std::vector<double>& y = acts.back();
    for (int k = 0; k < 2; ++k) {
      const double e = y[k] - (p.t[i][k] - st.out_mean[k]) / st.out_scale[k];
      total += e * e / 2.0;
    }
  }
  return total / static_cast<double>(p.x.size());
}

void BatchGradient(const Mlp& net, const Prepared& p, const Standardizer& st, std::span<const std::size_t> idx,
                   Gradients& g) {
  for (auto& w : g.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);
  const double weight = 1.0 / static_cast<double>(idx.size());
  for (std::size_t i : idx) {
    const auto acts = ForwardAll(net, p.x[i]);
    const std::vector<double>& y = acts.back();
    std::vector<double> delta(2);
    for (int k = 0; k < 2; ++k) {
      delta[k] = 2.0 * (y[k] - (p.t[i][k] - st.out_mean[k]) / st.out_scale[k]) / 2.0;
    }
    Accumulate(net, acts, std::move(delta), weight, g);
  }
}

}  // namespace

SensorLayout DefaultSensorLayout(double ring_radius, double setback, double tilt) {
  SensorLayout layout;
  layout[0] = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  for (int i = 1; i < kSensorCount; ++i) {
    const double phi = 2.0 * kPi * (i - 1) / (kSensorCount - 1);
    layout[i].offset = {-setback, ring_radius * std::cos(phi), ring_radius * std::sin(phi)};
    layout[i].boresight = {std::cos(tilt), std::sin(tilt) * std::cos(phi), std::sin(tilt) * std::sin(phi)};
  }
  return layout;
}

Readings CalibrateCoefficients(const SensorLayout& layout, double reference_distance) {
  if (!(reference_distance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reference distance must be positive");
  const Vec3 axis = layout[0].boresight.Normalized();
  const double s1 = reference_distance - Dot(layout[0].offset, axis);
  Readings coeffs{};
  for (int i = 0; i < kSensorCount; ++i) {
    const double along = Dot(layout[i].boresight.Normalized(), axis);
    if (!(along > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sensor does not face the calibration wall");
    const double raw = (reference_distance - Dot(layout[i].offset, axis)) / along;
    if (!(raw > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sensor lies beyond the calibration wall");
    coeffs[i] = i == 0 ? 1.0 : s1 / raw;
  }
  return coeffs;
}

SensorArray NormalizeReadings(const Readings& raw, const Readings& coefficients) {
  SensorArray a;
  a.coefficients = coefficients;
  for (int i = 0; i < kSensorCount; ++i) {
    if (raw[i] < 0.0 || std::isnan(raw[i])) {
      throw Error(ErrorCode::kNegativeReading, "sensor S" + std::to_string(i + 1) + " reads " + std::to_string(raw[i]));
    }
    a.readings[i] = coefficients[i] * raw[i];
  }
  return a;
}

std::size_t Mlp::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

Mlp ZeroMlp(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw Error(ErrorCode::kInvalidArgument, "a network needs at least two layers");
  for (int s : sizes) {
    if (s <= 0) throw Error(ErrorCode::kInvalidArgument, "layer sizes must be positive");
  }
  Mlp net;
  net.sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    net.weights.emplace_back(static_cast<std::size_t>(sizes[l]) * sizes[l + 1], 0.0);
    net.biases.emplace_back(sizes[l + 1], 0.0);
  }
  return net;
}

Mlp MakeMlp(const std::vector<int>& sizes, std::uint64_t seed) {
  Mlp net = ZeroMlp(sizes);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& w : net.weights[l]) w = u(rng);
  }
  return net;
}

std::vector<double> Forward(const Mlp& net, std::span<const double> input) {
  CheckShapes(net, input.size(), 0);
  return ForwardAll(net, input).back();
}

double SampleMse(const Mlp& net, std::span<const double> input, std::span<const double> target) {
  CheckShapes(net, input.size(), target.size());
  const std::vector<double> y = Forward(net, input);
  double total = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) total += (y[k] - target[k]) * (y[k] - target[k]);
  return total / static_cast<double>(y.size());
}

Gradients BackpropGradients(const Mlp& net, std::span<const double> input, std::span<const double> target) {
  CheckShapes(net, input.size(), target.size());
  const auto acts = ForwardAll(net, input);
  const std::vector<double>& y = acts.back();
  std::vector<double> delta(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) delta[k] = 2.0 * (y[k] - target[k]) / static_cast<double>(y.size());
  Gradients g = ZeroGradients(net);
  Accumulate(net, acts, std::move(delta), 1.0, g);
  return g;
}

std::array<double, 2> Targets(const Sample& s) { return {s.d_min, static_cast<double>(s.index)}; }

Sample LabelReadings(const Readings& readings) {
  Sample s;
  s.readings = readings;
  s.d_min = readings[0];
  s.index = 1;
  for (int i = 1; i < kSensorCount; ++i) {
    if (readings[i] < s.d_min) {
      s.d_min = readings[i];
      s.index = i + 1;
    }
  }
  return s;
}

TrainResult Train(const Mlp& initial, const Dataset& data, const TrainConfig& cfg) {
  const std::size_t n = data.samples.size();
  if (n < 20) throw Error(ErrorCode::kDatasetTooSmall, "need at least 20 samples, got " + std::to_string(n));
  CheckShapes(initial, kSensorCount, 2);
  for (double r : cfg.split) {
    if (!(r > 0.0)) throw Error(ErrorCode::kInvalidArgument, "split ratios must be positive");
  }
  if (std::abs(cfg.split[0] + cfg.split[1] + cfg.split[2] - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split ratios must sum to 1");
  }
  if (!(cfg.learning_rate > 0.0) || cfg.max_epochs < 1 || cfg.patience < 1) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate, max_epochs and patience must be positive");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * cfg.split[1])));
  const std::size_t n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * cfg.split[2])));
  const std::size_t n_train = n - n_val - n_test;
  std::vector<const Sample*> train, val, test;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample* s = &data.samples[order[i]];
    (i < n_train ? train : i < n_train + n_val ? val : test).push_back(s);
  }

  const Standardizer st = Fit(train);
  const Prepared p_train = Prepare(train, st);
  const Prepared p_val = Prepare(val, st);

  Mlp net = Unfold(initial, st);
  Mlp best = net;
  double best_val = std::numeric_limits<double>::infinity();
  Gradients g = ZeroGradients(net);
  Gradients m1 = ZeroGradients(net);
  Gradients m2 = ZeroGradients(net);
  std::size_t steps = 0;
  const std::size_t batch = cfg.batch_size == 0 ? n_train : std::min(cfg.batch_size, n_train);
  std::vector<std::size_t> idx(n_train);
  std::iota(idx.begin(), idx.end(), 0);

  TrainReport report;
  int epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    report.train_mse_history.push_back(SetMse(net, p_train, st));
    if (batch < n_train) std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t start = 0; start < n_train; start += batch) {
      const std::size_t end = std::min(start + batch, n_train);
      BatchGradient(net, p_train, st, std::span<const std::size_t>(idx).subspan(start, end - start), g);
      ++steps;
      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        auto update = [&](std::vector<double>& param, const std::vector<double>& grad, std::vector<double>& a,
                          std::vector<double>& b) {
          for (std::size_t j = 0; j < param.size(); ++j) {
            if (cfg.optimizer == Optimizer::kAdam) {
              a[j] = 0.9 * a[j] + 0.1 * grad[j];
              b[j] = 0.999 * b[j] + 0.001 * grad[j] * grad[j];
              const double mh = a[j] / (1.0 - std::pow(0.9, static_cast<double>(steps)));
              const double vh = b[j] / (1.0 - std::pow(0.999, static_cast<double>(steps)));
              param[j] -= cfg.learning_rate * mh / (std::sqrt(vh) + 1e-8);
            } else {
              a[j] = cfg.momentum * a[j] - cfg.learning_rate * grad[j];
              param[j] += a[j];
            }
          }
        };
        update(net.weights[l], g.weights[l], m1.weights[l], m2.weights[l]);
        update(net.biases[l], g.biases[l], m1.biases[l], m2.biases[l]);
      }
    }
    const double v = SetMse(net, p_val, st);
    if (v < best_val) {
      best_val = v;
      best = net;
      report.best_epoch = epoch + 1;
    }
    if (epoch + 1 - report.best_epoch >= cfg.patience) {
      ++epoch;
      break;
    }
  }
  report.epochs_run = epoch;

  TrainResult result;
  result.net = Fold(best, st);
  auto raw_mse = [&](const std::vector<const Sample*>& set) {
    double total = 0.0;
    for (const Sample* s : set) {
      const auto t = Targets(*s);
      total += SampleMse(result.net, Input(*s), t);
    }
    return set.empty() ? 0.0 : total / static_cast<double>(set.size());
  };
  report.final_train_mse = raw_mse(train);
  report.final_val_mse = raw_mse(val);
  for (const Sample* s : test) {
    const std::vector<double> y = Forward(result.net, Input(*s));
    const auto t = Targets(*s);
    report.test_errors.push_back({t[0] - y[0], t[1] - y[1]});
  }
  report.train_size = n_train;
  report.val_size = n_val;
  report.test_size = n_test;
  result.report = std::move(report);
  return result;
}

namespace {

// Star-shaped obstacle: ellipsoid radial function with bounded smooth
// deformation and an optional narrow notch.
struct Blob3 {
  Vec3 center;
  Vec3 semi_axes;
  std::vector<Vec3> dirs;
  std::vector<double> weights;
  std::vector<double> freqs;
  std::vector<double> phases;
  double deformation = 0.0;
  Vec3 notch_axis;
  double notch_depth = 0.0;  // relative
  double notch_width = 0.1;  // rad

  double Radius(const Vec3& u) const {
    const double q = (u.x / semi_axes.x) * (u.x / semi_axes.x) + (u.y / semi_axes.y) * (u.y / semi_axes.y) +
                     (u.z / semi_axes.z) * (u.z / semi_axes.z);
    double r = 1.0 / std::sqrt(q);
    double eps = 0.0;
    for (std::size_t k = 0; k < dirs.size(); ++k) eps += weights[k] * std::cos(freqs[k] * Dot(u, dirs[k]) + phases[k]);
    r *= 1.0 + deformation * eps;
    if (notch_depth > 0.0) {
      const double a = std::acos(std::clamp(Dot(u, notch_axis), -1.0, 1.0));
      r *= 1.0 - notch_depth * std::exp(-(a * a) / (2.0 * notch_width * notch_width));
    }
    return r;
  }

  double MaxExtent() const {
    return std::max({semi_axes.x, semi_axes.y, semi_axes.z}) * (1.0 + deformation);
  }

  // Positive outside.
  double Level(const Vec3& p) const {
    const Vec3 d = p - center;
    const double n = d.Norm();
    if (n == 0.0) return -1.0;
    return n - Radius(d / n);
  }

  double Cast(const Vec3& o, const Vec3& dir, double max_range) const {
    constexpr double kStep = 0.005;
    double prev_t = 0.0;
    double prev = Level(o);
    if (prev <= 0.0) return 0.0;
    for (double t = kStep; t <= max_range; t += kStep) {
      const double cur = Level(o + dir * t);
      if (cur <= 0.0) {
        double lo = prev_t;
        double hi = t;
        for (int i = 0; i < 60; ++i) {
          const double mid = 0.5 * (lo + hi);
          (Level(o + dir * mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      prev_t = t;
      prev = cur;
    }
    return max_range;
  }
};

Vec3 RandomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    if (v.Norm() > 1e-9) return v.Normalized();
  }
}

Blob3 RandomBlob(const SceneConfig& cfg, std::mt19937_64& rng, bool notch) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Blob3 b;
  const double base = cfg.min_size + (cfg.max_size - cfg.min_size) * u(rng);
  b.semi_axes = {base * (0.7 + 0.6 * u(rng)), base * (0.7 + 0.6 * u(rng)), base * (0.7 + 0.6 * u(rng))};
  b.deformation = cfg.deformation;
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    b.dirs.push_back(RandomUnit(rng));
    b.weights.push_back(0.5 + 0.5 * u(rng));
    b.freqs.push_back(2.0 + 2.0 * u(rng));
    b.phases.push_back(2.0 * kPi * u(rng));
    total += b.weights.back();
  }
  for (double& w : b.weights) w /= total;
  if (notch) {
    // Opening roughly towards the robot so the sensors can look into it.
    b.notch_axis = (Vec3{-1.0, 0.0, 0.0} + RandomUnit(rng) * 0.5).Normalized();
    b.notch_depth = 0.6;
    b.notch_width = 0.08 + 0.07 * u(rng);
  }
  return b;
}

}  // namespace

double RayToSphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius, double max_range) {
  const Vec3 d = dir.Normalized();
  const Vec3 oc = origin - center;
  const double b = Dot(oc, d);
  const double c = oc.SquaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return max_range;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) return c <= 0.0 ? 0.0 : max_range;
  return std::min(t, max_range);
}

Dataset SynthDataset(const SceneConfig& cfg, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "dataset size must be at least 1");
  const Readings coeffs = CalibrateCoefficients(cfg.layout, cfg.reference_distance);
  Dataset data;
  data.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    const int archetype = static_cast<int>(s % 3);
    std::vector<Blob3> blobs;
    const int count = archetype == 2 ? 2 : 1;
    for (int b = 0; b < count; ++b) {
      Blob3 blob = RandomBlob(cfg, rng, archetype == 1);
      const double gap = cfg.min_distance + (cfg.max_distance - cfg.min_distance) * u(rng);
      blob.center = {gap + blob.MaxExtent(), cfg.lateral_spread * (2.0 * u(rng) - 1.0),
                     cfg.lateral_spread * (2.0 * u(rng) - 1.0)};
      // S1 looks along +x, so a shift along x moves its hit by the same amount:
      // put the surface seen by S1 at exactly `gap` when S1 hits at all.
      const double far = 2.0 * blob.MaxExtent() + cfg.max_distance;
      const double hit = blob.Cast(cfg.layout[0].offset, {1.0, 0.0, 0.0}, far);
      if (hit < far) blob.center.x -= hit - gap;
      blobs.push_back(std::move(blob));
    }
    Readings raw{};
    for (int i = 0; i < kSensorCount; ++i) {
      double best = cfg.max_range;
      for (const Blob3& blob : blobs) {
        best = std::min(best, blob.Cast(cfg.layout[i].offset, cfg.layout[i].boresight.Normalized(), cfg.max_range));
      }
      raw[i] = best;
    }
    data.samples.push_back(LabelReadings(NormalizeReadings(raw, coeffs).readings));
  }
  return data;
}

void WriteDataset(const Dataset& data, std::ostream& out) {
  out.precision(17);
  out << "n=" << data.samples.size() << " seed=" << data.seed << '\n';
  for (const Sample& s : data.samples) {
    for (double r : s.readings) out << r << ' ';
    out << s.d_min << ' ' << s.index << '\n';
  }
}

Dataset ReadDataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::kParseError, "empty dataset");
  unsigned long long n = 0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(), "n=%llu seed=%llu", &n, &seed) != 2) {
    throw Error(ErrorCode::kParseError, "dataset header must read 'n=<count> seed=<seed>'");
  }
  Dataset data;
  data.seed = seed;
  std::string line;
  std::size_t lineno = 1;
  while (data.samples.size() < n && std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    Sample s;
    for (double& r : s.readings) row >> r;
    row >> s.d_min >> s.index;
    if (!row) throw Error(ErrorCode::kParseError, "dataset line " + std::to_string(lineno) + " is malformed");
    data.samples.push_back(s);
  }
  if (data.samples.size() != n) {
    throw Error(ErrorCode::kParseError, "dataset declares " + std::to_string(n) + " samples, found " +
                                            std::to_string(data.samples.size()));
  }
  return data;
}

void WriteModel(const Mlp& net, std::ostream& out) {
  out.precision(17);
  for (std::size_t i = 0; i < net.sizes.size(); ++i) out << (i ? " " : "") << net.sizes[i];
  out << '\n';
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const std::size_t cols = net.sizes[l];
    for (std::size_t r = 0; r < static_cast<std::size_t>(net.sizes[l + 1]); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out << (c ? " " : "") << net.weights[l][r * cols + c];
      out << '\n';
    }
    for (std::size_t r = 0; r < net.biases[l].size(); ++r) out << (r ? " " : "") << net.biases[l][r];
    out << '\n';
  }
}

Mlp ReadModel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "empty model file");
  std::istringstream head(line);
  std::vector<int> sizes;
  for (int s; head >> s;) sizes.push_back(s);
  Mlp net = ZeroMlp(sizes);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (double& w : net.weights[l]) {
      if (!(in >> w)) throw Error(ErrorCode::kParseError, "model truncated in layer " + std::to_string(l));
    }
    for (double& b : net.biases[l]) {
      if (!(in >> b)) throw Error(ErrorCode::kParseError, "model truncated in layer " + std::to_string(l));
    }
  }
  return net;
}

}  // namespace navkit
