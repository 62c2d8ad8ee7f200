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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gnelearn/schedule.hpp"

namespace gnelearn {

/// Trajectory of one learner run. Row r (0-based) holds the state reached
/// after iteration t = r + 1, i.e. mu(t) and lambda(t), together with the
/// observations x(t-1), payoffs J^0_i(t-1) and g(x(t-1)) that produced it.
/// Storage is column-blocked and contiguous per quantity.
struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  LearnerMode mode = LearnerMode::coupled;
  int players = 0;
  int dim = 0;
  int constraints = 0;
  long iterations = 0;

  Eigen::VectorXd initial_means;
  Eigen::VectorXd initial_dual;

  std::vector<double> means;        // iterations x (players*dim)
  std::vector<double> duals;        // iterations x constraints
  std::vector<double> samples;      // iterations x (players*dim)
  std::vector<double> payoffs;      // iterations x players
  std::vector<double> constraint_values;  // iterations x constraints
  std::vector<double> relative_errors;    // iterations, NaN without a reference

  // Terminal summary.
  std::optional<double> final_relative_error;
  double final_violation = 0.0;  // max(0, max_k g_k(mu(T)))
  double final_movement = 0.0;   // ||mu(T) - mu(T-1)||
  double max_dual_norm = 0.0;
  double wall_seconds = 0.0;

  int joint_dim() const { return players * dim; }
  long rows() const { return iterations; }

  Eigen::Map<const Eigen::VectorXd> mean_row(long r) const {
    return {means.data() + r * joint_dim(), joint_dim()};
  }
  Eigen::Map<const Eigen::VectorXd> dual_row(long r) const {
    return {duals.data() + r * constraints, constraints};
  }
  Eigen::Map<const Eigen::VectorXd> sample_row(long r) const {
    return {samples.data() + r * joint_dim(), joint_dim()};
  }
  Eigen::Map<const Eigen::VectorXd> payoff_row(long r) const { return {payoffs.data() + r * players, players}; }
  Eigen::Map<const Eigen::VectorXd> constraint_row(long r) const {
    return {constraint_values.data() + r * constraints, constraints};
  }
  Eigen::VectorXd final_means() const;
  Eigen::VectorXd final_dual() const;

  // Bitwise equality of everything except wall-clock time.
  bool same_trajectory(const RunRecord& other) const;
};

}  // namespace gnelearn
