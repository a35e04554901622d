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

#include <fmt/format.h>

#include "commands.h"

namespace compsyn::cli {

namespace {

std::string Escape(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += "\\|";
    else out += c;
  }
  return out;
}

std::string OptionTable(const CLI::App& app) {
  std::string out = "| Flag | Default | Required | Description |\n|---|---|---|---|\n";
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    std::string def = opt->get_default_str();
    if (opt->get_type_size() == 0) def = "off";
    out += fmt::format("| `{}` | {} | {} | {} |\n", opt->get_name(),
                       def.empty() ? "" : "`" + Escape(def) + "`",
                       opt->get_required() ? "yes" : "", Escape(opt->get_description()));
  }
  return out;
}

}  // namespace

std::string RenderManual(const CLI::App& app) {
  std::string out = "# compsyn command reference\n\n";
  out += "Generated by `compsyn manual`; do not edit by hand.\n\n";
  out += "Usage: `compsyn [global options] <command> [options]`\n\n";
  out += "Options can also come from a TOML-style file passed with `--config`. Global keys go "
         "at the top; command options go under a `[command]` table. Flags on the command line "
         "override the file.\n\n";
  out += "Exit status: 0 success, 1 configuration error, 2 data error, 3 numerical failure.\n\n";
  out += "## Global options\n\n" + OptionTable(app) + "\n";
  for (const CLI::App* sub : app.get_subcommands({})) {
    out += fmt::format("## {}\n\n{}\n\n", sub->get_name(), sub->get_description());
    out += fmt::format("`compsyn {} [options]`\n\n", sub->get_name());
    out += OptionTable(*sub) + "\n";
  }
  return out;
}

}  // namespace compsyn::cli
