// Copyright 2026 The metts-trotter Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "metts/config.hpp"
#include "metts/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"METTS sampling with symmetry-preserving basis rotations for Bose-Hubbard chains"};
  app.set_version_flag("--version", metts::kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the mode described by a JSON config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Override sampling.seed");
  run->add_option("--output", output, "Override output.path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; any other usage error counts as a config error.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "I/O error: cannot read config '" << config_path << "'\n";
    return 3;
  }
  std::stringstream text;
  text << in.rdbuf();

  metts::RunConfig config;
  try {
    nlohmann::json j = nlohmann::json::parse(text.str());
    if (seed) j["sampling"]["seed"] = *seed;
    if (output) j["output"]["path"] = *output;
    config = metts::parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: invalid JSON: " << e.what() << '\n';
    return 1;
  } catch (const metts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  return metts::dispatch(config, std::cout, std::cerr);
}
