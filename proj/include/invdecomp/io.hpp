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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "invdecomp/cumulants.hpp"
#include "invdecomp/group.hpp"
#include "invdecomp/kernels.hpp"
#include "invdecomp/sampler.hpp"
#include "invdecomp/spectral.hpp"
#include "invdecomp/torus.hpp"

namespace invdecomp {

using json = nlohmann::ordered_json;

json to_json(const FiniteGroup& g);
json to_json(const CharacterTable& t);
json to_json(const GroupAction& a);
/// {order, mul, inv, identity, irreps, perm} in one object.
json to_json(const GroupWithTable& gt, const GroupAction* action = nullptr);

FiniteGroup group_from_json(const json& j);
CharacterTable table_from_json(const FiniteGroup& g, const json& j);
GroupAction action_from_json(const FiniteGroup& g, const json& j);

json to_json(const CumulantVector& c);
json to_json(const WatsonCheckReport& r);
json to_json(const Z2ConditionReport& r);
json to_json(const MgfValues& m);
json to_json(const DistributionComparison& c);
json to_json(const IdentityCheckReport& r);
json to_json(const CumulantMcReport& r);
json to_json(const EigenspaceReport& r);
json to_json(const Lattice& l);
json to_json(const TorusKernelSpec& s);
json to_json(const TorusWatsonReport& r);

enum class MatrixFormat { automatic, binary, csv };

/// Writes <stem>.json (shape, points, weights, data file name) and the matrix
/// row-major as <stem>.bin (float64, little endian) or <stem>.csv. automatic
/// picks binary above 10^6 entries.
void write_kernel(const std::filesystem::path& stem, const Kernel& k,
                  MatrixFormat format = MatrixFormat::automatic);
Kernel read_kernel(const std::filesystem::path& header);

/// Header JSON plus row-major float64 samples (m x S).
void write_ensemble(const std::filesystem::path& stem, const PathEnsemble& e);
Matrix read_ensemble(const std::filesystem::path& header);

/// One value per line.
void write_column_csv(const std::filesystem::path& path, const Vector& v, const std::string& header);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace invdecomp
