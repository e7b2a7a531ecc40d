// Copyright 2026 The invdecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, validate and list-presets.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "invdecomp/runner.hpp"

namespace {

using invdecomp::json;

constexpr int kExitConfig = 2;

// The config file with an optional preset underneath it (file fields win).
invdecomp::ExperimentConfig resolve_config(const std::string& path, const std::string& preset) {
  if (preset.empty()) return invdecomp::load_config(path);
  json base = invdecomp::preset_json(preset);
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw invdecomp::Error(invdecomp::Errc::config_error, path + ": cannot open");
    std::stringstream ss;
    ss << is.rdbuf();
    json patch;
    try {
      patch = json::parse(ss.str());
    } catch (const json::parse_error&) {
      invdecomp::parse_config(ss.str(), path);  // rethrows with the location
    }
    base.merge_patch(patch);
  }
  return invdecomp::config_from_json(base);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invdecomp: invariant decompositions of Gaussian quadratic functionals"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  int threads = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run the checks of an experiment");
  run->add_option("config", config_path, "Experiment config (JSON)");
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  run->add_option("--preset", preset, "Start from a built-in preset; a config file is merged on top");
  run->add_option("--tol-scale", tol_scale, "Multiply every tolerance")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "Worker threads (speed only; INVDECOMP_THREADS also works)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", quiet, "Do not print the summary");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* list = app.add_subcommand("list-presets", "Print the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& name : invdecomp::preset_names())
        std::cout << name << "  " << invdecomp::preset_json(name).value("description", "") << '\n';
      return 0;
    }
    if (validate->parsed()) {
      const auto cfg = invdecomp::load_config(config_path);
      std::cout << config_path << ": ok (" << cfg.checks.size() << " checks)\n";
      return 0;
    }
    if (config_path.empty() && preset.empty()) {
      std::cerr << "run: a config file or --preset is required\n";
      return kExitConfig;
    }
    const auto cfg = resolve_config(config_path, preset);
    invdecomp::RunOptions opt;
    if (*seed_opt) opt.seed = seed;
    if (*out_opt) opt.out_dir = out_dir;
    opt.tol_scale = tol_scale;
    opt.threads = threads;
    const auto outcome = invdecomp::run_experiment(cfg, opt);
    if (!quiet) std::cout << outcome.summary;
    return outcome.exit_code;
  } catch (const invdecomp::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == invdecomp::Errc::config_error ? kExitConfig : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
