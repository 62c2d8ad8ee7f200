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
#include <iosfwd>
#include <optional>
#include <span>

#include "gnelearn/game.hpp"
#include "gnelearn/random.hpp"
#include "gnelearn/record.hpp"
#include "gnelearn/schedule.hpp"

namespace gnelearn {

// eta(t) = [mu(t), lambda(t)] plus the generator that drives the sampling.
struct LearnerState {
  long t = 0;
  JointAction means;
  DualVector dual;
  Rng rng;
};

struct IterationSample {
  JointAction state;
  Vector payoffs;
  Vector constraint;
};

// x^i ~ N(mu^i, sigma_i^2 I_d), drawn player by player, coordinate by coordinate.
JointAction sample_state(const JointAction& means, std::span<const double> sigma, Rng& rng);

// Proj_A[ mu - gamma_next * sigma_next^2 * payoff * (x - mu) / sigma_curr^2 ].
Vector primal_update(const Vector& mean, double payoff, const Vector& sample, double gamma_next, double sigma_next,
                     double sigma_curr, const ConvexSet& set);

// Proj_{R^n_+}[ lambda + beta * g ].
DualVector dual_update(const DualVector& lambda, const Vector& constraint, double beta);

struct LearnerOptions {
  std::optional<Vector> initial_means;  // default: projected box midpoints
  std::optional<Vector> initial_dual;   // default: zero
  std::optional<Vector> reference;      // equilibrium for the rel_err column
  double dual_warning_norm = 1e6;
  std::ostream* warnings = nullptr;     // std::clog when null
};

// Builds the initial state (t = 0) the runners start from.
LearnerState initial_state(const GameSpec& game, LearnerMode mode, std::uint64_t seed,
                           const LearnerOptions& options = {});

// Advances one iteration: samples x(t), observes payoffs (and g(x(t)) when
// coupled), then updates all means and the dual simultaneously.
IterationSample step(const GameSpec& game, const Schedule& schedule, LearnerMode mode, LearnerState& state);

/// Payoff-based learning with the dual player. Each player only observes
/// J_i(x(t)) + (lambda(t), g(x(t))) and the dual player only g(x(t)).
/// A schedule that fails validation is reported as a warning, not an error.
RunRecord run_coupled(const GameSpec& game, const Schedule& schedule, long iterations, std::uint64_t seed,
                      const LearnerOptions& options = {});

/// Same loop without constraints: payoffs are J_i(x(t)) and no dual player.
RunRecord run_uncoupled(const GameSpec& game, const Schedule& schedule, long iterations, std::uint64_t seed,
                        const LearnerOptions& options = {});

}  // namespace gnelearn
