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

#include "gnelearn/learner.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "gnelearn/errors.hpp"

namespace gnelearn {

JointAction sample_state(const JointAction& means, std::span<const double> sigma, Rng& rng) {
  if (static_cast<int>(sigma.size()) != means.players()) throw DimensionError("one standard deviation per player");
  for (double s : sigma)
    if (!(s > 0.0)) throw std::invalid_argument("sampling standard deviation must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  JointAction x(means.players(), means.dim());
  for (int i = 0; i < means.players(); ++i)
    for (int k = 0; k < means.dim(); ++k) x.block(i)[k] = means.block(i)[k] + sigma[i] * normal(rng);
  return x;
}

Vector primal_update(const Vector& mean, double payoff, const Vector& sample, double gamma_next, double sigma_next,
                     double sigma_curr, const ConvexSet& set) {
  if (!(sigma_curr > 0.0)) throw std::invalid_argument("current standard deviation must be positive");
  if (mean.size() != sample.size()) throw DimensionError("mean and sample differ in length");
  const double variance_ratio = (sigma_next * sigma_next) / (sigma_curr * sigma_curr);
  return project(set, mean - gamma_next * variance_ratio * payoff * (sample - mean));
}

DualVector dual_update(const DualVector& lambda, const Vector& constraint, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("dual step must be positive");
  if (lambda.values.size() != constraint.size()) throw DimensionError("dual vector and constraint differ in length");
  return DualVector((lambda.values + beta * constraint).cwiseMax(0.0));
}

LearnerState initial_state(const GameSpec& game, LearnerMode mode, std::uint64_t seed, const LearnerOptions& options) {
  LearnerState state{0, JointAction(game.players, game.dim), DualVector(), make_rng(seed)};
  if (options.initial_means) {
    if (options.initial_means->size() != game.joint_dim()) throw DimensionError("initial means length");
    state.means.values() = project_blocks(game.local_sets, *options.initial_means);
  } else {
    for (int i = 0; i < game.players; ++i) state.means.block(i) = game.local_sets[i].anchor();
  }
  const int n = mode == LearnerMode::coupled ? game.constraints : 0;
  if (options.initial_dual) {
    if (options.initial_dual->size() != n) throw DimensionError("initial dual length");
    state.dual = DualVector(options.initial_dual->cwiseMax(0.0));
  } else {
    state.dual = DualVector::zeros(n);
  }
  return state;
}

IterationSample step(const GameSpec& game, const Schedule& schedule, LearnerMode mode, LearnerState& state) {
  const int players = game.players;
  const long t = state.t;
  std::vector<double> sigma(static_cast<std::size_t>(players));
  for (int i = 0; i < players; ++i) sigma[i] = step_sizes(schedule, t, i).sigma;

  IterationSample obs{sample_state(state.means, sigma, state.rng), Vector(players), Vector(0)};
  const Vector& x = obs.state.values();

  double price = 0.0;
  if (mode == LearnerMode::coupled) {
    obs.constraint = game.constraint(x);
    price = state.dual.values.dot(obs.constraint);
  }
  for (int i = 0; i < players; ++i) obs.payoffs[i] = game.costs[i](x) + price;

  // Jacobi-style: every update below uses time-t quantities only.
  JointAction next(players, game.dim);
  for (int i = 0; i < players; ++i) {
    const StepSizes ahead = step_sizes(schedule, t + 1, i);
    next.block(i) = primal_update(state.means.block(i), obs.payoffs[i], obs.state.block(i), ahead.gamma, ahead.sigma,
                                  sigma[i], game.local_sets[i]);
  }
  if (mode == LearnerMode::coupled) state.dual = dual_update(state.dual, obs.constraint, dual_step(schedule, t + 1));
  state.means = std::move(next);
  state.t = t + 1;
  return obs;
}

namespace {

RunRecord run(const GameSpec& game, const Schedule& schedule, long iterations, std::uint64_t seed,
              const LearnerOptions& options, LearnerMode mode) {
  if (iterations < 1) throw std::invalid_argument("need at least one iteration");
  if (static_cast<int>(schedule.offsets.size()) != game.players)
    throw DimensionError("schedule needs one offset per player");
  std::ostream& warn = options.warnings ? *options.warnings : std::clog;
  if (const auto violations = validate_schedule(schedule, mode); !violations.empty()) {
    warn << "warning: schedule (a=" << schedule.a << ", b=" << schedule.b << ") violates";
    for (const auto& v : violations) warn << ' ' << v;
    warn << " for " << to_string(mode) << " learning; convergence is not guaranteed\n";
  }

  const auto started = std::chrono::steady_clock::now();
  LearnerState state = initial_state(game, mode, seed, options);

  RunRecord rec;
  rec.seed = seed;
  rec.mode = mode;
  rec.players = game.players;
  rec.dim = game.dim;
  rec.constraints = mode == LearnerMode::coupled ? game.constraints : 0;
  rec.iterations = iterations;
  rec.initial_means = state.means.values();
  rec.initial_dual = state.dual.values;

  const auto rows = static_cast<std::size_t>(iterations);
  const auto nd = static_cast<std::size_t>(game.joint_dim());
  const auto n = static_cast<std::size_t>(rec.constraints);
  rec.means.resize(rows * nd);
  rec.duals.resize(rows * n);
  rec.samples.resize(rows * nd);
  rec.payoffs.resize(rows * static_cast<std::size_t>(game.players));
  rec.constraint_values.resize(rows * n);
  rec.relative_errors.assign(rows, std::numeric_limits<double>::quiet_NaN());

  const bool with_reference = options.reference && options.reference->norm() > 0.0;
  if (options.reference && options.reference->size() != game.joint_dim())
    throw DimensionError("reference equilibrium length");
  const double reference_norm = with_reference ? options.reference->norm() : 1.0;

  bool warned_dual = false;
  Vector previous = state.means.values();
  for (long r = 0; r < iterations; ++r) {
    previous = state.means.values();
    const IterationSample obs = step(game, schedule, mode, state);
    const auto row = static_cast<std::size_t>(r);
    Eigen::Map<Vector>(rec.means.data() + row * nd, static_cast<Eigen::Index>(nd)) = state.means.values();
    Eigen::Map<Vector>(rec.samples.data() + row * nd, static_cast<Eigen::Index>(nd)) = obs.state.values();
    Eigen::Map<Vector>(rec.payoffs.data() + row * game.players, game.players) = obs.payoffs;
    if (n > 0) {
      Eigen::Map<Vector>(rec.duals.data() + row * n, static_cast<Eigen::Index>(n)) = state.dual.values;
      Eigen::Map<Vector>(rec.constraint_values.data() + row * n, static_cast<Eigen::Index>(n)) = obs.constraint;
      const double dual_norm = state.dual.values.norm();
      rec.max_dual_norm = std::max(rec.max_dual_norm, dual_norm);
      if (!warned_dual && dual_norm > options.dual_warning_norm) {
        warn << "warning: ||lambda(" << state.t << ")|| = " << dual_norm << " exceeds " << options.dual_warning_norm
             << "\n";
        warned_dual = true;
      }
    }
    if (with_reference) rec.relative_errors[row] = (state.means.values() - *options.reference).norm() / reference_norm;
  }

  if (with_reference) rec.final_relative_error = rec.relative_errors.back();
  if (game.constraints > 0) {
    const Vector g = game.constraint(state.means.values());
    rec.final_violation = std::max(0.0, g.maxCoeff());
  }
  rec.final_movement = (state.means.values() - previous).norm();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

}  // namespace

RunRecord run_coupled(const GameSpec& game, const Schedule& schedule, long iterations, std::uint64_t seed,
                      const LearnerOptions& options) {
  if (game.constraints < 1) throw std::invalid_argument("run_coupled needs at least one coupling constraint");
  return run(game, schedule, iterations, seed, options, LearnerMode::coupled);
}

RunRecord run_uncoupled(const GameSpec& game, const Schedule& schedule, long iterations, std::uint64_t seed,
                        const LearnerOptions& options) {
  if (game.constraints != 0)
    throw std::invalid_argument("run_uncoupled needs an uncoupled game; drop the coupling explicitly first");
  return run(game, schedule, iterations, seed, options, LearnerMode::uncoupled);
}

}  // namespace gnelearn
