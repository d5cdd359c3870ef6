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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "navkit/vec.hpp"

namespace navkit {

inline constexpr int kSensorCount = 9;
using Readings = std::array<double, kSensorCount>;

// Sonar mounted on the robot's front surface. S1 sits at the origin looking
// along +x; the frame is the robot body frame.
struct SensorMount {
  Vec3 offset;
  Vec3 boresight;  // unit
};
using SensorLayout = std::array<SensorMount, kSensorCount>;

// S1 at the center, S2..S9 evenly on a ring of `ring_radius`, set back by
// `setback` along -x (the surface is convex) and tilted outward by `tilt`.
SensorLayout DefaultSensorLayout(double ring_radius = 0.15, double setback = 0.03,
                                 double tilt = Degrees(10.0));

// Coefficients mapping each sensor's reading of a wall perpendicular to S1's
// boresight at `reference_distance` onto S1's reading. Exact at that distance
// only. Coefficient 0 is 1.
Readings CalibrateCoefficients(const SensorLayout& layout, double reference_distance = 1.0);

struct SensorArray {
  Readings readings{};
  Readings coefficients{};
};

// readings[i] = coefficients[i] * raw[i]. Throws kNegativeReading.
SensorArray NormalizeReadings(const Readings& raw, const Readings& coefficients);

// Layered network: sigmoid on hidden layers, identity on the output layer.
struct Mlp {
  std::vector<int> sizes;                    // e.g. {9, 12, 2}
  std::vector<std::vector<double>> weights;  // layer l: sizes[l+1] x sizes[l], row-major
  std::vector<std::vector<double>> biases;   // layer l: sizes[l+1]

  std::size_t ParameterCount() const;
};

// Uniform Glorot initialisation, biases zero. Throws kInvalidArgument for
// fewer than two layers or non-positive sizes.
Mlp MakeMlp(const std::vector<int>& sizes, std::uint64_t seed);
Mlp ZeroMlp(const std::vector<int>& sizes);

std::vector<double> Forward(const Mlp& net, std::span<const double> input);

// Per-sample loss: mean over outputs of the squared error.
double SampleMse(const Mlp& net, std::span<const double> input, std::span<const double> target);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Exact gradient of SampleMse with respect to every weight and bias.
Gradients BackpropGradients(const Mlp& net, std::span<const double> input,
                            std::span<const double> target);

struct Sample {
  Readings readings{};  // normalized
  double d_min = 0.0;   // smallest reading
  int index = 1;        // 1-based sensor achieving it, lowest on ties
};

struct Dataset {
  std::uint64_t seed = 0;
  std::vector<Sample> samples;
};

enum class Optimizer { kGradientDescent, kAdam };

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.0;         // gradient descent only
  std::size_t batch_size = 0;    // 0: full batch
  int max_epochs = 5000;
  int patience = 200;
  std::array<double, 3> split{0.7, 0.15, 0.15};  // train, validation, test
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdam;
};

struct TrainReport {
  double final_train_mse = 0.0;  // raw units, of the returned weights
  double final_val_mse = 0.0;
  // Training objective per epoch, before the update: MSE of the standardized
  // outputs, so both targets weigh equally.
  std::vector<double> train_mse_history;
  std::vector<std::array<double, 2>> test_errors;  // target - output
  int epochs_run = 0;
  int best_epoch = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;
};

struct TrainResult {
  Mlp net;
  TrainReport report;
};

// Shuffles with cfg.seed, splits, and trains on (d_min, index) targets with
// inputs and targets standardized on the training split; the returned network
// has the standardization folded back into its weights. Returns the weights
// with the lowest validation MSE. Throws kDatasetTooSmall below 20 samples.
TrainResult Train(const Mlp& net, const Dataset& data, const TrainConfig& cfg);

// Targets of a sample as network outputs.
std::array<double, 2> Targets(const Sample& s);

// Sample with labels derived from the readings.
Sample LabelReadings(const Readings& readings);

struct SceneConfig {
  SensorLayout layout = DefaultSensorLayout();
  double reference_distance = 1.0;  // calibration wall
  double max_range = 4.0;           // reading when nothing is hit
  double min_distance = 0.5;        // S1 reading range, m
  double max_distance = 2.5;
  double lateral_spread = 0.3;      // obstacle center offset across the boresight, m
  double min_size = 1.0;            // mean semi-axis range, m
  double max_size = 2.0;
  double deformation = 0.1;         // relative radial deformation bound
};

// Scenes cycle through three archetypes: a single smooth obstacle, one with a
// narrow notch, and two obstacles. Readings are ray casts along the
// boresights, normalized with the calibrated coefficients.
Dataset SynthDataset(const SceneConfig& cfg, std::size_t n, std::uint64_t seed);

// Reading of one ray against a sphere, used by tests and the dead-ahead
// scene; max_range on a miss.
double RayToSphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius,
                   double max_range);

// "n=<count> seed=<seed>" then "r1 ... r9 dmin idx" per sample.
void WriteDataset(const Dataset& data, std::ostream& out);
Dataset ReadDataset(std::istream& in);

// Layer sizes line, then per layer the weight rows and a bias line.
void WriteModel(const Mlp& net, std::ostream& out);
Mlp ReadModel(std::istream& in);

}  // namespace navkit
