// Copyright 2026 The Crossres Authors
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

// crossres: resonance, validate, simulate and sweep commands over a YAML
// experiment config.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "crossres/experiment.hpp"

namespace {

struct Sub {
  CLI::App* app = nullptr;
  std::string config;
  std::string out;
  std::string format;
  bool dt_refine = false;
};

void add_common(Sub& s) {
  s.app->add_option("--config", s.config, "experiment config (YAML)")
      ->required()
      ->check(CLI::ExistingFile);
  s.app->add_option("--out", s.out, "output file (default: stdout)");
  s.app->add_option("--format", s.format, "output format, overrides the config")
      ->check(CLI::IsMember({"csv", "json"}));
  s.app->add_flag("--dt-refine", s.dt_refine,
                  "re-run time-ordered propagation at dt/2 and fail if results move");
}

crossres::CommandOptions options(const Sub& s) {
  crossres::CommandOptions o;
  o.config = s.config;
  if (!s.out.empty()) o.out = s.out;
  if (s.format == "csv") o.format = crossres::OutputFormat::csv;
  if (s.format == "json") o.format = crossres::OutputFormat::json;
  o.dt_refine = s.dt_refine;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-resonant conditional operations on a driven qubit and bosonic modes"};
  app.require_subcommand(1);

  using Command = int (*)(const crossres::CommandOptions&, std::ostream&, std::ostream&);
  const std::map<std::string, std::pair<const char*, Command>> commands = {
      {"resonance", {"report frame integers and resonance bookkeeping", crossres::cmd_resonance}},
      {"validate", {"static checks: shapes, frame, RWA margin, truncation", crossres::cmd_validate}},
      {"simulate", {"propagate and compare with the conditional target", crossres::cmd_simulate}},
      {"sweep", {"final-time comparison across a parameter axis", crossres::cmd_sweep}},
  };
  std::map<std::string, Sub> subs;
  for (const auto& [name, entry] : commands) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, entry.first);
    add_common(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : crossres::exit_code::parse;
  }

  for (const auto& [name, entry] : commands) {
    const Sub& s = subs.at(name);
    if (s.app->parsed()) return entry.second(options(s), std::cout, std::cerr);
  }
  return crossres::exit_code::internal;
}
