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

#include <cstdint>
#include <optional>

#include "gnelearn/game.hpp"

namespace gnelearn {

// Multi-period Cournot market: player i chooses production a^i in R^d,
//   J_i(a) = a^i' Q^i a^i + 2 (C (1/N) sum_j a^j + c)' a^i,
// subject to 0 <= a^i_k <= player_cap and sum_i a^i_k <= capacities_k.
struct CournotParams {
  int players = 0;
  int horizon = 0;
  std::vector<Matrix> production;  // Q^i
  Matrix price;                    // C
  Vector offset;                   // c
  double player_cap = 9.0;
  Vector capacities;               // one per step
  std::uint64_t master_seed = 0;
};

struct CournotOverrides {
  std::optional<Vector> offset;
  std::optional<Vector> capacities;
  std::optional<double> player_cap;
};

struct CournotGame {
  GameSpec game;
  CournotParams params;
};

// Q^i = C = I; c ~ N(0, I) and capacities ~ U(3N, 3N + 100) drawn from
// master_seed unless overridden.
CournotGame build_cournot(int players, int horizon, std::uint64_t master_seed, const CournotOverrides& overrides = {});

// Builds the game from fully specified parameters.
GameSpec cournot_game(const CournotParams& params);

/// Two players, one step, boxes [0, 9]:
///   J_i(a) = a_i^2 + (a_1 + a_2)^2 / 2 + 2 c a_i,   g(a) = a_1 + a_2 - capacity.
/// Its mapping M_i = 3 a_i + a_{-i} + 2c is strongly monotone with modulus 2.
/// With c = -4 and capacity 3 the variational equilibrium is (1.5, 1.5), lambda = 2.
GameSpec micro_game(double c = -4.0, double capacity = 3.0, bool coupled = true);

}  // namespace gnelearn
