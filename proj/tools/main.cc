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

#include <iostream>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.h"
#include "compsyn/errors.h"

namespace {

void LogResolvedConfig(const CLI::App& app, const compsyn::cli::Globals& g) {
  spdlog::info("resolved configuration:");
  spdlog::info("  seed = {}", g.seed);
  spdlog::info("  threads = {}", g.threads);
  spdlog::info("  log-level = \"{}\"", g.log_level);
  for (const CLI::App* sub : app.get_subcommands()) {
    spdlog::info("  [{}]", sub->get_name());
    std::istringstream lines(sub->config_to_str(true, false));
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty()) spdlog::info("  {}", line);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_logger_st("compsyn");
  logger->set_pattern("[compsyn] %l: %v");
  spdlog::set_default_logger(logger);

  CLI::App app{"compsyn: syntax-structured composition analysis toolkit"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML-style config file; command-line flags take precedence");
  compsyn::cli::Globals g;
  app.add_option("--seed", g.seed, "Seed for every random draw");
  app.add_option("--threads", g.threads, "Worker threads; 1 is the reference execution")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
  app.require_subcommand(1);
  app.fallthrough();

  std::function<void()> action;
  compsyn::cli::AddCommands(app, g, action);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  LogResolvedConfig(app, g);

  try {
    action();
    return 0;
  } catch (const compsyn::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return 1;
  } catch (const compsyn::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return 3;
  } catch (const compsyn::DataError& e) {
    spdlog::error("data error: {}", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("data error: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("error: {}", e.what());
    return 1;
  }
}
