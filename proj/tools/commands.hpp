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

#include "CLI11.hpp"

namespace navkit::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedRun = 1;
inline constexpr int kExitConfig = 2;

// Each Add* registers a subcommand whose callback stores its exit code here.
void AddSimCommands(CLI::App& app, int& exit_code);
void AddCoverageCommands(CLI::App& app, int& exit_code);
void AddBpnnCommands(CLI::App& app, int& exit_code);

}  // namespace navkit::cli
