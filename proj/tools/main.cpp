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

#include <iostream>

#include "commands.hpp"
#include "navkit/error.hpp"
#include "navkit/kernels/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"navkit: reactive navigation simulator and coverage planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "navkit 0.1.0");
  bool show_kernels = false;
  app.add_flag("--kernels", show_kernels, "Print the active kernel table name to stderr");

  int exit_code = navkit::cli::kExitOk;
  navkit::cli::AddSimCommands(app, exit_code);
  navkit::cli::AddCoverageCommands(app, exit_code);
  navkit::cli::AddBpnnCommands(app, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? navkit::cli::kExitOk : navkit::cli::kExitConfig;
  } catch (const navkit::Error& e) {
    std::cerr << "navkit: " << e.what() << '\n';
    return navkit::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "navkit: " << e.what() << '\n';
    return navkit::cli::kExitConfig;
  }
  if (show_kernels) std::cerr << "kernels: " << navkit::kernels::Active().name << '\n';
  return exit_code;
}
