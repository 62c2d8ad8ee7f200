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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "gnelearn/cournot.hpp"
#include "gnelearn/game.hpp"
#include "gnelearn/schedule.hpp"

namespace gnelearn {

// Parse or schema failure; the message carries "line L:C" when it can be located.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  nlohmann::json document;  // normalized, with defaults filled in
  std::string hash;         // FNV-1a over the normalized document, minus seed and output dir

  std::string game_type;    // cournot | quadratic | builtin-micro
  nlohmann::json game_params;

  Schedule schedule;
  LearnerMode mode = LearnerMode::coupled;
  long iterations = 1000;
  std::uint64_t seed = 1;
  std::optional<Vector> mu0;
  std::optional<Vector> lambda0;

  bool oracle_enabled = true;
  double oracle_tol = 1e-8;
  long oracle_max_iters = 2'000'000;

  std::string output_dir = "out";
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Re-derives the hash after a field of `document` changed.
void rehash(ExperimentConfig& config);

struct BuiltGame {
  GameSpec game;  // already stripped of coupling in uncoupled mode
  std::optional<CournotParams> cournot;
};

// Builds the game described by the config; throws ConfigError on bad params.
BuiltGame build_game(const ExperimentConfig& config);

// Config for the Cournot recipe with the given players, horizon and master seed.
nlohmann::json cournot_config(int players, int horizon, std::uint64_t seed, long iterations = 300);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace gnelearn
