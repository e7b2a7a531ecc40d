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

#include <map>

#include "invdecomp/runner.hpp"

namespace invdecomp {

namespace {

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> p{
      {"watson-duplication", R"({
  "name": "watson-duplication",
  "description": "Watson statistic against the sum of two independent half-scaled bridge statistics",
  "rho": 1.0,
  "grid": {"n": 256},
  "samples": 100000,
  "seed": 1,
  "checks": ["duplication"]
})"},
      {"polarized-watson", R"({
  "name": "polarized-watson",
  "description": "Correlated pairs at rho = 0.5: Watson relation on traces and the polarized duplication in law",
  "kernel": {"name": "watson"},
  "action": {"name": "reversal"},
  "grid": {"n": 256},
  "rho": 0.5,
  "n_max": 6,
  "samples": 100000,
  "seed": 2,
  "checks": ["invariance", "projection", "cumulants", "watson_relation", "duplication"]
})"},
      {"quadruplication", R"({
  "name": "quadruplication",
  "description": "Compensated sheet statistic against four tied sheet statistics",
  "grid": {"n": [32, 32]},
  "rho": 0.5,
  "samples": 50000,
  "seed": 3,
  "checks": ["quadruplication"]
})"},
      {"prop9-watson", R"({
  "name": "prop9-watson",
  "description": "Twisted contraction traces of the Watson kernel under reversal",
  "kernel": {"name": "watson"},
  "group": {"kind": "cyclic", "n": 2},
  "action": {"name": "reversal"},
  "grid": {"n": 512},
  "n_max": 6,
  "tolerances": {"z2_condition": 1e-6},
  "checks": ["invariance", "z2_condition"]
})"},
      {"mgf-check", R"({
  "name": "mgf-check",
  "description": "Closed-form moment generating function against the spectral product and Monte Carlo",
  "samples": 100000,
  "seed": 5,
  "mgf": {"points": [[0.5, 0.5], [1.0, 0.2], [0.3, 0.9]], "pairs": 2000, "grid": 256},
  "checks": ["mgf"]
})"},
      {"kl-bridge", R"({
  "name": "kl-bridge",
  "description": "Bridge eigenvalues, eigenspace invariance and the canonical decomposition",
  "kernel": {"name": "bridge"},
  "action": {"name": "reversal"},
  "grid": {"n": 1024},
  "checks": ["spectrum"]
})"},
      {"kl-watson", R"({
  "name": "kl-watson",
  "description": "Watson eigenvalues (double), eigenspace invariance and the canonical decomposition",
  "kernel": {"name": "watson"},
  "action": {"name": "reversal"},
  "grid": {"n": 1024},
  "checks": ["spectrum"]
})"},
      {"torus-1d", R"({
  "name": "torus-1d",
  "description": "Watson profile on the unit circle: Fourier expansion and parity split",
  "samples": 100000,
  "seed": 7,
  "torus": {"basis": [[1.0]], "grid": [256], "cutoff": 127, "profile": "watson"},
  "checks": ["torus"]
})"},
      {"torus-2d", R"({
  "name": "torus-2d",
  "description": "Product Watson profile on a skew two-dimensional torus",
  "samples": 20000,
  "seed": 8,
  "torus": {"basis": [[1.0, 0.0], [0.5, 1.0]], "grid": [32, 32], "cutoff": 15, "profile": "watson"},
  "checks": ["torus"]
})"}};
  return p;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"watson-duplication", "polarized-watson", "quadruplication", "prop9-watson", "mgf-check",
          "kl-bridge",          "kl-watson",        "torus-1d",        "torus-2d"};
}

json preset_json(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw Error(Errc::config_error, "unknown preset '" + name + "'");
  return json::parse(it->second);
}

}  // namespace invdecomp
