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

#include <string>
#include <vector>

namespace gnelearn {

// Power-law step-size and variance schedule shared by all players:
//   gamma_i(t) = (t + R_i)^-a,  sigma_i(t) = (t + R_i)^-b,
//   beta_i(t) = gamma_i(t) sigma_i(t)^2,  beta_0(t) = (t + N_0)^-(a + 2b).
struct Schedule {
  double a = 0.6;
  double b = 0.2;
  std::vector<int> offsets;  // R_i, one per player
  int dual_offset = 1;       // N_0

  static Schedule uniform(int players, double a = 0.6, double b = 0.2, int offset = 1, int dual_offset = 1);
};

inline constexpr int kDualPlayer = -1;

struct StepSizes {
  double gamma;  // NaN for the dual player
  double sigma;  // NaN for the dual player
  double beta;
};

// Values at iteration t for player i, or beta_0(t) when player == kDualPlayer.
StepSizes step_sizes(const Schedule& s, long t, int player);
double dual_step(const Schedule& s, long t);

enum class LearnerMode { coupled, uncoupled };

// Names of the violated exponent conditions, e.g. "2a>1". Empty means valid.
std::vector<std::string> validate_schedule(const Schedule& s, LearnerMode mode);

const char* to_string(LearnerMode mode);

}  // namespace gnelearn
