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

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit::cli {

namespace fs = std::filesystem;

namespace {

bool RunFailed(const RunSummary& s) { return !s.reached || s.collided; }

void WriteOutputs(const Scenario& s, const RunResult& run, const fs::path& dir, bool svg,
                  bool jsonl) {
  fs::create_directories(dir);
  const std::string stem = s.name.empty() ? "run" : s.name;
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open(stem + ".csv");
    WriteCsv(run.log, out);
  }
  if (jsonl) {
    auto out = open(stem + ".jsonl");
    WriteJsonl(run.log, out);
  }
  {
    auto out = open(stem + ".summary.json");
    out << SummaryToJson(run.summary) << '\n';
  }
  if (svg) {
    auto out = open(stem + ".svg");
    RenderSvg(s, run, out);
  }
}

// Directory part taken literally, file name matched with fnmatch.
std::vector<fs::path> ExpandGlob(const std::string& pattern) {
  const fs::path p(pattern);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  const std::string name = p.filename().string();
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (fnmatch(name.c_str(), entry.path().filename().string().c_str(), 0) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct BatchItem {
  fs::path path;
  int code = kExitOk;
  std::string line;
};

void RunOne(BatchItem& item, const std::string& out_dir) {
  std::ostringstream line;
  line << item.path.string() << ": ";
  Scenario s;
  try {
    s = LoadScenario(item.path);
  } catch (const Error& e) {
    item.code = kExitConfig;
    line << "config error: " << e.what();
    item.line = line.str();
    return;
  }
  const RunResult run = RunSim(s);
  const RunSummary& sum = run.summary;
  item.code = RunFailed(sum) ? kExitFailedRun : kExitOk;
  line << sum.termination << " steps=" << sum.steps << " length=" << FormatDouble(sum.path_length)
       << " min_clearance=" << FormatDouble(sum.min_clearance);
  if (!out_dir.empty()) WriteOutputs(s, run, out_dir, false, false);
  item.line = line.str();
}

}  // namespace

void AddSimCommands(CLI::App& app, int& exit_code) {
  {
    auto* cmd = app.add_subcommand("run", "Simulate one scenario");
    auto scenario = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>("out");
    auto svg = std::make_shared<bool>(false);
    auto jsonl = std::make_shared<bool>(false);
    cmd->add_option("scenario", *scenario, "Scenario JSON file")->required();
    cmd->add_option("--out", *out_dir, "Output directory")->capture_default_str();
    cmd->add_flag("--svg", *svg, "Also write an SVG plot");
    cmd->add_flag("--jsonl", *jsonl, "Also write the log as JSON lines");
    cmd->callback([=, &exit_code] {
      const Scenario s = LoadScenario(*scenario);
      const RunResult run = RunSim(s);
      WriteOutputs(s, run, *out_dir, *svg, *jsonl);
      std::cout << SummaryToJson(run.summary) << '\n';
      for (const std::string& v : run.summary.violations) std::cerr << v << '\n';
      exit_code = RunFailed(run.summary) ? kExitFailedRun : kExitOk;
    });
  }
  {
    auto* cmd = app.add_subcommand("batch", "Simulate every scenario matching a pattern");
    auto pattern = std::make_shared<std::string>();
    auto jobs = std::make_shared<int>(1);
    auto out_dir = std::make_shared<std::string>();
    cmd->add_option("pattern", *pattern, "File pattern, e.g. 'scenarios/*.json'")->required();
    cmd->add_option("--jobs,-j", *jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", *out_dir, "Write per-scenario outputs here");
    cmd->callback([=, &exit_code] {
      std::vector<BatchItem> items;
      for (const fs::path& p : ExpandGlob(*pattern)) items.push_back({p, kExitOk, {}});
      if (items.empty()) {
        std::cerr << "no files match " << *pattern << '\n';
        exit_code = kExitConfig;
        return;
      }
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) RunOne(items[i], *out_dir);
      };
      std::vector<std::thread> pool;
      const int n = std::min<int>(*jobs, static_cast<int>(items.size()));
      for (int t = 1; t < n; ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      int code = kExitOk;
      for (const BatchItem& it : items) {
        std::cout << it.line << '\n';
        code = std::max(code, it.code);
      }
      exit_code = code;
    });
  }
  {
    auto* cmd = app.add_subcommand("validate", "Load and check a scenario without running it");
    auto scenario = std::make_shared<std::string>();
    cmd->add_option("scenario", *scenario, "Scenario JSON file")->required();
    cmd->callback([=, &exit_code] {
      const Scenario s = LoadScenario(*scenario);
      std::cout << (s.name.empty() ? *scenario : s.name) << ": ok ("
                << s.obstacles.size() << " obstacles, horizon " << s.EffectiveHorizon() << ")\n";
      exit_code = kExitOk;
    });
  }
}

}  // namespace navkit::cli
