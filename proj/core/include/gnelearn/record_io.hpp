// Copyright 2026 The gnelearn Authors
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
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnelearn/record.hpp"

namespace gnelearn {

// t, mu_1..mu_{Nd}, lambda_1..lambda_n, g_1..g_n, rel_err, payoff_1..payoff_N
std::vector<std::string> trajectory_columns(const RunRecord& record);

// One row per iteration, 17 significant digits; rel_err is left empty when absent.
void write_trajectory_csv(const RunRecord& record, std::ostream& out);
void write_trajectory_csv(const RunRecord& record, const std::filesystem::path& path);

nlohmann::json summary_json(const RunRecord& record);

}  // namespace gnelearn
