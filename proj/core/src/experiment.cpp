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

#include "gnelearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gnelearn/errors.hpp"
#include "gnelearn/learner.hpp"
#include "gnelearn/random.hpp"
#include "gnelearn/record_io.hpp"

namespace gnelearn {

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) out += (out.empty() ? "" : ", ") + l;
  return out;
}

std::string rejection_message(const EquilibriumCertificate& c) {
  std::ostringstream msg;
  msg << "oracle certificate not accepted (" << c.method << "): stationarity " << c.stationarity
      << ", complementarity " << c.complementarity << ", feasibility " << c.feasibility << " against tol " << c.tol;
  return msg.str();
}

// Everything a run needs that does not depend on the seed.
struct Plan {
  ExperimentConfig config;
  GameSpec game;
  std::vector<std::string> violations;
  std::optional<EquilibriumCertificate> certificate;
  LearnerOptions learner;
};

Plan prepare(const ExperimentConfig& config, const ExperimentOptions& options) {
  Plan plan;
  plan.config = apply_overrides(config, options);
  plan.game = build_game(plan.config).game;
  plan.violations = validate_schedule(plan.config.schedule, plan.config.mode);
  if (options.strict && !plan.violations.empty()) throw ScheduleViolation(plan.violations);

  if (plan.config.oracle_enabled && plan.game.has_gradients() && plan.game.has_constraint_jacobian()) {
    plan.certificate = compute_oracle(plan.game, plan.config);
    if (!plan.certificate->accepted()) throw OracleRejected(*plan.certificate);
    plan.learner.reference = plan.certificate->primal.values();
  }
  plan.learner.initial_means = plan.config.mu0;
  plan.learner.initial_dual = plan.config.lambda0;
  return plan;
}

ExperimentResult execute(const Plan& plan, std::uint64_t seed, const ExperimentOptions& options) {
  ExperimentResult result;
  result.certificate = plan.certificate;
  result.schedule_violations = plan.violations;
  const ExperimentConfig& cfg = plan.config;
  result.record = cfg.mode == LearnerMode::coupled
                      ? run_coupled(plan.game, cfg.schedule, cfg.iterations, seed, plan.learner)
                      : run_uncoupled(plan.game, cfg.schedule, cfg.iterations, seed, plan.learner);
  result.record.config_hash = cfg.hash;

  if (options.write_files) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    result.trajectory_path = dir / ("trajectory_" + std::to_string(seed) + ".csv");
    write_trajectory_csv(result.record, *result.trajectory_path);

    nlohmann::json summary = summary_json(result.record);
    summary["config"] = cfg.document;
    summary["schedule_violations"] = plan.violations;
    if (plan.certificate) summary["oracle"] = certificate_json(*plan.certificate);
    result.summary_path = dir / ("summary_" + std::to_string(seed) + ".json");
    std::ofstream out(*result.summary_path);
    if (!out) throw std::runtime_error("cannot write " + result.summary_path->string());
    out << summary.dump(2) << '\n';
  }
  if (options.log) {
    const RunRecord& r = result.record;
    *options.log << "seed " << seed << ": T=" << r.iterations << " mode=" << to_string(r.mode);
    if (r.final_relative_error) *options.log << " rel_err=" << *r.final_relative_error;
    *options.log << " violation=" << r.final_violation << " movement=" << r.final_movement << " ("
                 << r.wall_seconds << " s)\n";
  }
  return result;
}

}  // namespace

ScheduleViolation::ScheduleViolation(std::vector<std::string> labels)
    : std::runtime_error("schedule violates " + join_labels(labels)), labels_(std::move(labels)) {}

OracleRejected::OracleRejected(EquilibriumCertificate certificate)
    : std::runtime_error(rejection_message(certificate)), certificate_(std::move(certificate)) {}

ExperimentConfig apply_overrides(ExperimentConfig config, const ExperimentOptions& options) {
  if (options.seed) {
    config.seed = *options.seed;
    config.document["learner"]["seed"] = config.seed;
  }
  if (options.iterations) {
    if (*options.iterations < 1) throw ConfigError("--iters must be at least 1");
    config.iterations = *options.iterations;
    config.document["learner"]["iters"] = config.iterations;
  }
  if (options.output_dir) {
    config.output_dir = *options.output_dir;
    config.document["output"]["dir"] = config.output_dir;
  }
  rehash(config);
  return config;
}

EquilibriumCertificate compute_oracle(const GameSpec& game, const ExperimentConfig& config) {
  if (mapping_asymmetry(game) <= 1e-8) {
    try {
      EquilibriumCertificate cert = solve_potential(game, config.oracle_tol);
      if (cert.accepted()) return cert;
    } catch (const UnsupportedOperation&) {
    } catch (const ConvergenceError&) {
    }
  }
  return solve_vi(game, config.oracle_tol, config.oracle_max_iters);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  const Plan plan = prepare(config, options);
  return execute(plan, plan.config.seed, options);
}

std::vector<std::uint64_t> sweep_seed_list(std::uint64_t master, int count) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < count; ++k) seeds.push_back(derive_seed(master, static_cast<std::uint64_t>(k)));
  return seeds;
}

double quantile(std::vector<double> values, double q) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

EnsembleSummary sweep_seeds(const ExperimentConfig& config, int count, const ExperimentOptions& options,
                            bool keep_records, unsigned workers) {
  if (count < 1) throw std::invalid_argument("sweep needs at least one seed");
  const Plan plan = prepare(config, options);

  EnsembleSummary summary;
  summary.config_hash = plan.config.hash;
  summary.master_seed = plan.config.seed;
  summary.seeds = sweep_seed_list(plan.config.seed, count);
  summary.certificate = plan.certificate;
  summary.final_errors.assign(static_cast<std::size_t>(count), std::numeric_limits<double>::quiet_NaN());
  summary.final_violations.assign(static_cast<std::size_t>(count), 0.0);
  if (keep_records) summary.records.resize(static_cast<std::size_t>(count));

  ExperimentOptions run_options = options;
  run_options.log = nullptr;
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        const auto idx = static_cast<std::size_t>(k);
        ExperimentResult res = execute(plan, summary.seeds[idx], run_options);
        summary.final_errors[idx] = res.record.final_relative_error.value_or(std::numeric_limits<double>::quiet_NaN());
        summary.final_violations[idx] = res.record.final_violation;
        if (keep_records) summary.records[idx] = std::move(res.record);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  summary.median_error = quantile(summary.final_errors, 0.5);
  summary.q10_error = quantile(summary.final_errors, 0.1);
  summary.q90_error = quantile(summary.final_errors, 0.9);
  summary.median_violation = quantile(summary.final_violations, 0.5);
  summary.q90_violation = quantile(summary.final_violations, 0.9);
  summary.max_violation = *std::max_element(summary.final_violations.begin(), summary.final_violations.end());

  if (options.log) {
    *options.log << count << " seeds: median rel_err=" << summary.median_error << " [q10 " << summary.q10_error
                 << ", q90 " << summary.q90_error << "], median violation=" << summary.median_violation
                 << ", max violation=" << summary.max_violation << '\n';
  }
  if (options.write_files) {
    std::ofstream out(std::filesystem::path(plan.config.output_dir) / "sweep_summary.json");
    if (!out) throw std::runtime_error("cannot write sweep summary");
    out << summary_json(summary).dump(2) << '\n';
  }
  return summary;
}

bool replay_matches(const ExperimentConfig& config, const RunRecord& record) {
  ExperimentOptions options;
  options.seed = record.seed;
  options.iterations = record.iterations;
  options.write_files = false;
  const Plan plan = prepare(config, options);
  if (plan.config.hash != record.config_hash) return false;
  return execute(plan, record.seed, options).record.same_trajectory(record);
}

nlohmann::json certificate_json(const EquilibriumCertificate& c) {
  const Vector& a = c.primal.values();
  return {
      {"method", c.method},
      {"accepted", c.accepted()},
      {"primal", std::vector<double>(a.begin(), a.end())},
      {"dual", std::vector<double>(c.dual.values.begin(), c.dual.values.end())},
      {"stationarity", c.stationarity},
      {"complementarity", c.complementarity},
      {"feasibility", c.feasibility},
      {"tol", c.tol},
      {"iterations", c.iterations},
  };
}

nlohmann::json summary_json(const EnsembleSummary& s) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json errors = nlohmann::json::array();
  for (double e : s.final_errors) errors.push_back(finite_or_null(e));
  nlohmann::json j{
      {"config_hash", s.config_hash},
      {"master_seed", s.master_seed},
      {"seeds", s.seeds},
      {"final_relative_errors", errors},
      {"final_violations", s.final_violations},
      {"median_relative_error", finite_or_null(s.median_error)},
      {"q10_relative_error", finite_or_null(s.q10_error)},
      {"q90_relative_error", finite_or_null(s.q90_error)},
      {"median_violation", s.median_violation},
      {"q90_violation", s.q90_violation},
      {"max_violation", s.max_violation},
  };
  if (s.certificate) j["oracle"] = certificate_json(*s.certificate);
  return j;
}

}  // namespace gnelearn
