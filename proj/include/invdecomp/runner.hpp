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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invdecomp/io.hpp"

namespace invdecomp {

/// Names accepted in "checks", in execution order.
const std::vector<std::string>& check_catalog();

/// A validated experiment description. `source` is the normalized JSON the
/// run echoes into its report.
struct ExperimentConfig {
  std::string name = "experiment";
  json kernel;  // {name, params}; null when no kernel check is requested
  json group;   // {kind, n, factors} or null
  std::string action = "none";
  std::vector<int> grid;
  std::string rule = "midpoint";  // quadrature on every interval axis
  double rho = 1.0;
  int n_max = 6;
  Index samples = 0;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  std::filesystem::path out_dir = "invdecomp-out";
  std::vector<std::string> formats{"json", "csv", "txt"};
  json torus;
  json mgf;

  json source;
};

/// Parses and validates. Errors are Errc::config_error with the JSON parse
/// location (line and column) or the offending field path.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const json& j);

/// Built-in experiment descriptions.
std::vector<std::string> preset_names();
json preset_json(const std::string& name);

enum class CheckStatus { passed, failed, skipped, info };
const char* to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::info;
  std::vector<std::string> depends_on;
  std::string message;
  json detail;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
  int threads = 0;     // overrides the config; never changes results
  bool write = true;   // write report files
  bool timestamp = true;
};

struct RunOutcome {
  std::vector<CheckResult> checks;
  json report;
  std::string summary;
  int exit_code = 0;  // 0 all non-vacuous checks pass, 1 otherwise
};

/// Default tolerance for a key, before overrides and scaling.
double default_tolerance(const std::string& key);

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace invdecomp
