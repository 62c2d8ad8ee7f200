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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnelearn/config.hpp"
#include "gnelearn/oracle.hpp"
#include "gnelearn/record.hpp"

namespace gnelearn {

class ScheduleViolation : public std::runtime_error {
 public:
  explicit ScheduleViolation(std::vector<std::string> labels);
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

class OracleRejected : public std::runtime_error {
 public:
  explicit OracleRejected(EquilibriumCertificate certificate);
  const EquilibriumCertificate& certificate() const { return certificate_; }

 private:
  EquilibriumCertificate certificate_;
};

struct ExperimentOptions {
  std::optional<std::uint64_t> seed;
  std::optional<long> iterations;
  std::optional<std::string> output_dir;
  bool strict = false;         // refuse invalid schedules instead of warning
  bool write_files = true;
  std::ostream* log = nullptr; // summary line per run
};

// Folds command-line overrides into the config and refreshes its hash.
ExperimentConfig apply_overrides(ExperimentConfig config, const ExperimentOptions& options);

// Potential solver when the mapping is symmetric, extragradient otherwise.
EquilibriumCertificate compute_oracle(const GameSpec& game, const ExperimentConfig& config);

struct ExperimentResult {
  RunRecord record;
  std::optional<EquilibriumCertificate> certificate;
  std::vector<std::string> schedule_violations;
  std::optional<std::filesystem::path> trajectory_path;
  std::optional<std::filesystem::path> summary_path;
};

/// Builds the game, certifies the reference equilibrium when the oracle is
/// enabled (throws OracleRejected if it is not accepted), runs the learner
/// and writes trajectory_<seed>.csv and summary_<seed>.json to the output
/// directory.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

struct EnsembleSummary {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_errors;      // NaN without a reference
  std::vector<double> final_violations;
  double median_error = 0.0;
  double q10_error = 0.0;
  double q90_error = 0.0;
  double median_violation = 0.0;
  double q90_violation = 0.0;
  double max_violation = 0.0;
  std::optional<EquilibriumCertificate> certificate;
  std::vector<RunRecord> records;        // filled when requested
};

// Seed k of a sweep is derive_seed(master, k).
std::vector<std::uint64_t> sweep_seed_list(std::uint64_t master, int count);

/// Runs `count` seeds concurrently (results are ordered by seed index, so the
/// summary does not depend on scheduling) and aggregates terminal statistics.
EnsembleSummary sweep_seeds(const ExperimentConfig& config, int count, const ExperimentOptions& options = {},
                            bool keep_records = false, unsigned workers = 0);

// Regenerates the run from (config, record.seed) and compares bitwise.
bool replay_matches(const ExperimentConfig& config, const RunRecord& record);

// Linear-interpolation quantile of the finite entries; NaN when there are none.
double quantile(std::vector<double> values, double q);

nlohmann::json certificate_json(const EquilibriumCertificate& certificate);
nlohmann::json summary_json(const EnsembleSummary& summary);

}  // namespace gnelearn
