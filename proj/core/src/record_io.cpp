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

#include "gnelearn/record_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace gnelearn {

Eigen::VectorXd RunRecord::final_means() const { return iterations > 0 ? Eigen::VectorXd(mean_row(iterations - 1)) : initial_means; }

Eigen::VectorXd RunRecord::final_dual() const { return iterations > 0 ? Eigen::VectorXd(dual_row(iterations - 1)) : initial_dual; }

namespace {

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
}

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

bool RunRecord::same_trajectory(const RunRecord& o) const {
  const bool same_error = final_relative_error.has_value() == o.final_relative_error.has_value() &&
                          (!final_relative_error || std::memcmp(&*final_relative_error, &*o.final_relative_error, sizeof(double)) == 0);
  return config_hash == o.config_hash && seed == o.seed && mode == o.mode && players == o.players && dim == o.dim &&
         constraints == o.constraints && iterations == o.iterations && same_bits(initial_means, o.initial_means) &&
         same_bits(initial_dual, o.initial_dual) && same_bits(means, o.means) && same_bits(duals, o.duals) &&
         same_bits(samples, o.samples) && same_bits(payoffs, o.payoffs) &&
         same_bits(constraint_values, o.constraint_values) && same_bits(relative_errors, o.relative_errors) &&
         same_error && std::memcmp(&final_violation, &o.final_violation, sizeof(double)) == 0 &&
         std::memcmp(&final_movement, &o.final_movement, sizeof(double)) == 0 &&
         std::memcmp(&max_dual_norm, &o.max_dual_norm, sizeof(double)) == 0;
}

std::vector<std::string> trajectory_columns(const RunRecord& r) {
  std::vector<std::string> cols{"t"};
  for (int k = 1; k <= r.joint_dim(); ++k) cols.push_back("mu_" + std::to_string(k));
  for (int k = 1; k <= r.constraints; ++k) cols.push_back("lambda_" + std::to_string(k));
  for (int k = 1; k <= r.constraints; ++k) cols.push_back("g_" + std::to_string(k));
  cols.emplace_back("rel_err");
  for (int k = 1; k <= r.players; ++k) cols.push_back("payoff_" + std::to_string(k));
  return cols;
}

void write_trajectory_csv(const RunRecord& r, std::ostream& out) {
  const auto cols = trajectory_columns(r);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (long row = 0; row < r.rows(); ++row) {
    out << row + 1;
    for (double v : r.mean_row(row)) put(out << ',', v);
    for (double v : r.dual_row(row)) put(out << ',', v);
    for (double v : r.constraint_row(row)) put(out << ',', v);
    out << ',';
    const double err = r.relative_errors[static_cast<std::size_t>(row)];
    if (!std::isnan(err)) put(out, err);
    for (double v : r.payoff_row(row)) put(out << ',', v);
    out << '\n';
  }
}

void write_trajectory_csv(const RunRecord& r, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trajectory_csv(r, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json summary_json(const RunRecord& r) {
  const Eigen::VectorXd mu = r.final_means(), lambda = r.final_dual();
  nlohmann::json j{
      {"config_hash", r.config_hash},
      {"seed", r.seed},
      {"mode", to_string(r.mode)},
      {"players", r.players},
      {"dim", r.dim},
      {"constraints", r.constraints},
      {"iterations", r.iterations},
      {"final_means", std::vector<double>(mu.begin(), mu.end())},
      {"final_dual", std::vector<double>(lambda.begin(), lambda.end())},
      {"final_violation", r.final_violation},
      {"final_movement", r.final_movement},
      {"max_dual_norm", r.max_dual_norm},
      {"wall_seconds", r.wall_seconds},
  };
  j["final_relative_error"] = r.final_relative_error ? nlohmann::json(*r.final_relative_error) : nlohmann::json(nullptr);
  return j;
}

}  // namespace gnelearn
