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
#include <fstream>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "json.hpp"
#include "navkit/bpnn.hpp"
#include "navkit/error.hpp"

namespace navkit::cli {

namespace {

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return in;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  return out;
}

}  // namespace

void AddBpnnCommands(CLI::App& app, int& exit_code) {
  auto* bpnn = app.add_subcommand("bpnn", "Sonar-array network: data, training, evaluation");
  bpnn->require_subcommand(1);

  {
    auto* gen = bpnn->add_subcommand("gen", "Synthesize labelled sonar readings");
    auto n = std::make_shared<std::size_t>(150);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    gen->add_option("--n", *n, "Number of samples")->capture_default_str();
    gen->add_option("--seed", *seed, "Scene seed")->capture_default_str();
    gen->add_option("--out", *out, "Dataset file")->required();
    gen->callback([=, &exit_code] {
      const Dataset d = SynthDataset(SceneConfig{}, *n, *seed);
      auto f = OpenOut(*out);
      WriteDataset(d, f);
      std::cout << "wrote " << d.samples.size() << " samples to " << *out << '\n';
      exit_code = kExitOk;
    });
  }
  {
    auto* train = bpnn->add_subcommand("train", "Train a 9-H-2 network");
    auto data = std::make_shared<std::string>();
    auto model = std::make_shared<std::string>();
    auto hidden = std::make_shared<int>(12);
    auto cfg = std::make_shared<TrainConfig>();
    auto gd = std::make_shared<bool>(false);
    train->add_option("--data", *data, "Dataset file")->required();
    train->add_option("--model", *model, "Output model file")->required();
    train->add_option("--hidden", *hidden, "Hidden units")->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--lr", cfg->learning_rate, "Learning rate")->capture_default_str();
    train->add_option("--epochs", cfg->max_epochs, "Epoch cap")->capture_default_str();
    train->add_option("--patience", cfg->patience, "Early-stopping patience")->capture_default_str();
    train->add_option("--batch", cfg->batch_size, "Batch size, 0 for full batch")->capture_default_str();
    train->add_option("--momentum", cfg->momentum, "Momentum (gradient descent)")->capture_default_str();
    train->add_option("--seed", cfg->seed, "Initialisation and shuffle seed")->capture_default_str();
    train->add_flag("--gd", *gd, "Plain gradient descent instead of Adam");
    train->callback([=, &exit_code] {
      auto in = OpenIn(*data);
      const Dataset d = ReadDataset(in);
      TrainConfig c = *cfg;
      if (*gd) c.optimizer = Optimizer::kGradientDescent;
      const Mlp init = MakeMlp({kSensorCount, *hidden, 2}, c.seed);
      const TrainResult r = Train(init, d, c);
      auto out = OpenOut(*model);
      WriteModel(r.net, out);
      double lo = 0.0, hi = 0.0;
      for (std::size_t i = 0; i < r.report.test_errors.size(); ++i) {
        const double e = r.report.test_errors[i][0];
        lo = i == 0 ? e : std::min(lo, e);
        hi = i == 0 ? e : std::max(hi, e);
      }
      nlohmann::json j;
      j["epochs"] = r.report.epochs_run;
      j["best_epoch"] = r.report.best_epoch;
      j["train_mse"] = r.report.final_train_mse;
      j["val_mse"] = r.report.final_val_mse;
      j["test_size"] = r.report.test_size;
      j["dmin_error_band"] = {lo, hi};
      std::cout << j.dump(2) << '\n';
      exit_code = kExitOk;
    });
  }
  {
    auto* eval = bpnn->add_subcommand("eval", "Evaluate a model on a dataset");
    auto data = std::make_shared<std::string>();
    auto model = std::make_shared<std::string>();
    eval->add_option("--data", *data, "Dataset file")->required();
    eval->add_option("--model", *model, "Model file")->required();
    eval->callback([=, &exit_code] {
      auto min = OpenIn(*model);
      const Mlp net = ReadModel(min);
      auto din = OpenIn(*data);
      const Dataset d = ReadDataset(din);
      if (d.samples.empty()) throw Error(ErrorCode::kDatasetTooSmall, "empty dataset");
      double mse = 0.0, lo = 0.0, hi = 0.0;
      std::size_t index_hits = 0;
      for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const Sample& s = d.samples[i];
        const auto t = Targets(s);
        mse += SampleMse(net, s.readings, t);
        const std::vector<double> y = Forward(net, s.readings);
        const double e = t[0] - y[0];
        lo = i == 0 ? e : std::min(lo, e);
        hi = i == 0 ? e : std::max(hi, e);
        index_hits += std::lround(y[1]) == s.index;
      }
      nlohmann::json j;
      j["samples"] = d.samples.size();
      j["mse"] = mse / static_cast<double>(d.samples.size());
      j["dmin_error_band"] = {lo, hi};
      j["index_accuracy"] = static_cast<double>(index_hits) / static_cast<double>(d.samples.size());
      std::cout << j.dump(2) << '\n';
      exit_code = kExitOk;
    });
  }
}

}  // namespace navkit::cli
