// Copyright 2026 The compsyn Authors.
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

#ifndef COMPSYN_TOOLS_COMMANDS_H_
#define COMPSYN_TOOLS_COMMANDS_H_

#include <cstdint>
#include <functional>
#include <string>

#include "CLI11.hpp"

namespace compsyn::cli {

// Options shared by every subcommand.
struct Globals {
  uint64_t seed = 0;
  size_t threads = 1;
  std::string log_level = "info";
};

// Registers every subcommand on `app`. The chosen subcommand stores its
// action in `action`; main runs it after parsing so errors map to exit codes.
void AddCommands(CLI::App& app, const Globals& globals, std::function<void()>& action);

// Markdown reference for all subcommands, flags and defaults.
std::string RenderManual(const CLI::App& app);

}  // namespace compsyn::cli

#endif  // COMPSYN_TOOLS_COMMANDS_H_
