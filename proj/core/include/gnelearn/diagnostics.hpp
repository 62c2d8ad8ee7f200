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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnelearn/game.hpp"
#include "gnelearn/record.hpp"
#include "gnelearn/schedule.hpp"

namespace gnelearn {

// Gaussian mixed strategies x^j ~ N(means^j, sigma_j^2 I) for every player and
// a fixed dual vector. `player` may equal N to address the dual player.
struct MixedQuery {
  int player = 0;
  Vector means;
  Vector sigma;  // one per player
  Vector dual;
  long samples = 100000;
  std::uint64_t seed = 1;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::optional<double> closed_form;  // quadratic costs with affine coupling
};

// Monte-Carlo estimate of the mixed-strategy cost E[J^0_player(x, lambda)].
Estimate mixed_cost(const MixedQuery& q, const GameSpec& game);

struct ScoreGradientReport {
  Vector estimate;  // mean of J^0_i (x^i_k - mu^i_k) / sigma_i^2
  Vector stderr_;
  Vector target;    // d/dmu^i_k of the mixed cost
  std::string target_kind;  // "closed-form" or "finite-difference"
  bool pass = false;

  // Dual side: mean of g(x) against g(mu), present for affine coupling.
  std::optional<Vector> constraint_mean;
  std::optional<Vector> constraint_stderr;
  std::optional<Vector> constraint_target;
  bool dual_pass = true;
};

// Compares the score-function estimator against the gradient of the mixed
// cost; PASS iff every coordinate lies within 3 standard errors.
ScoreGradientReport score_gradient_check(const MixedQuery& q, const GameSpec& game);

struct BiasReport {
  Vector estimate;  // mean over x of M^0_i(x, lambda) - M^0_i(mu, lambda)
  Vector stderr_;
  double norm = 0.0;
  bool within_noise = false;  // every coordinate within 3 standard errors of 0
};

// Gap between the Gaussian-averaged and the point-evaluated extended mapping
// for one regular player.
BiasReport bias_term(const MixedQuery& q, const GameSpec& game);

enum class MonotonicityClass { strong, strict, monotone, pseudo_undetermined, violated };
const char* to_string(MonotonicityClass c);

struct MonotonicityReport {
  MonotonicityClass verdict = MonotonicityClass::violated;
  double kappa = 0.0;      // exact symmetric-part minimum eigenvalue when affine, else sampled ratio
  bool affine = false;
  long pairs_checked = 0;
};

using VectorMap = std::function<Vector(const Vector&)>;

/// Classifies a mapping over the product of `domain` sets. Affine mappings
/// (detected by sampling) are classified exactly through the eigenvalues of
/// the symmetric part of their Jacobian; other mappings by sampling pairs.
/// Pseudo-monotonicity is only ever refuted, never certified.
MonotonicityReport monotonicity_classify(const VectorMap& mapping, std::span<const ConvexSet> domain,
                                         long samples = 10000, std::uint64_t seed = 7);

struct RateFitOptions {
  long burn_in = 1000;
  double tolerance = 0.15;
  std::size_t min_runs = 20;
  int points_per_decade = 40;
};

struct RateFit {
  double a = 0.0;
  double b = 0.0;
  std::vector<long> times;
  std::vector<double> mean_squared_error;  // ensemble mean at `times`
  double slope = 0.0;
  double intercept = 0.0;
  double theoretical_slope = 0.0;  // -(2(a+b) - 1)
  double tolerance = 0.0;
  bool pass = false;
};

// Curves are indexed by row: entry r is ||mu(r+1) - mu*||^2.
RateFit rate_fit_curves(std::span<const std::vector<double>> squared_errors, const Schedule& schedule,
                        const RateFitOptions& options = {});
RateFit rate_fit(std::span<const RunRecord> ensemble, const Vector& equilibrium, const Schedule& schedule,
                 const RateFitOptions& options = {});

std::vector<double> squared_error_curve(const RunRecord& record, const Vector& equilibrium);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct RecursionParams {
  double a0 = 1.0;
  double kappa = 2.0;
  double psi = 1.0;
  double c = 2.0;
};

struct RecursionReport {
  bool holds = false;              // a_t <= C / t^(c-1) for every 1 <= t <= T
  bool holds_beyond_kappa = false; // the same restricted to t > kappa
  double constant = 0.0;           // C = max(a0, psi / (kappa - 1))
  long first_violation = -1;
  long last_violation = -1;
  double worst_ratio = 0.0;        // max_t a_t t^(c-1) / C
};

/// Simulates a_{t+1} = max(0, 1 - kappa/t) a_t + psi / t^c from a_1 = a0 and
/// compares against C / t^(c-1).
RecursionReport recursion_bound_check(const RecursionParams& p, long horizon);

// ||mu - a*|| / ||a*||; throws std::domain_error when a* = 0.
double relative_error(const Vector& mu, const Vector& equilibrium);

}  // namespace gnelearn
