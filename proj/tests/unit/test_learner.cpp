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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gnelearn/cournot.hpp"
#include "gnelearn/errors.hpp"
#include "gnelearn/learner.hpp"
#include "gnelearn/random.hpp"

using namespace gnelearn;

namespace {

// J_i = 1/2 ||a^i - c_i||^2 on a large box.
GameSpec decoupled_game(const std::vector<Vector>& targets) {
  const int n = static_cast<int>(targets.size());
  const int d = static_cast<int>(targets.front().size());
  std::vector<QuadraticCost> costs;
  for (int i = 0; i < n; ++i) {
    QuadraticCost q{Matrix::Zero(n * d, n * d), Vector::Zero(n * d), 0.5 * targets[i].squaredNorm()};
    q.hessian.block(i * d, i * d, d, d).setIdentity();
    q.linear.segment(i * d, d) = -targets[i];
    costs.push_back(q);
  }
  return make_quadratic_game("decoupled", n, d, costs, std::nullopt,
                             std::vector<ConvexSet>(n, ConvexSet::box(d, -20, 20)));
}

GameSpec null_game(bool coupled) {
  GameSpec g;
  g.name = "null";
  g.players = 2;
  g.dim = 2;
  g.costs.assign(2, [](const Vector&) { return 0.0; });
  g.local_sets.assign(2, ConvexSet::box(2, 0, 9));
  if (coupled) {
    g.constraints = 1;
    g.constraint = [](const Vector&) { return Vector::Constant(1, -1.0); };
  }
  return g;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("sampling is reproducible and has the requested moments") {
  const JointAction zero(2, 3);
  const std::vector<double> unit{1.0, 1.0};
  Rng r1 = make_rng(42), r2 = make_rng(42);
  CHECK(sample_state(zero, unit, r1).values() == sample_state(zero, unit, r2).values());

  Vector mu(2);
  mu << 2, 3;
  const JointAction means(2, 1, mu);
  const std::vector<double> sigma{0.5, 0.5};
  Rng rng = make_rng(7);
  const long m = 1000000;
  Vector sum = Vector::Zero(2), sumsq = Vector::Zero(2);
  for (long s = 0; s < m; ++s) {
    const Vector x = sample_state(means, sigma, rng).values();
    sum += x;
    sumsq += (x - mu).cwiseAbs2();
  }
  const Vector mean = sum / m, var = sumsq / m;
  CHECK((mean - mu).cwiseAbs().maxCoeff() <= 3 * 0.5 / 1000);
  CHECK(std::abs(var[0] - 0.25) <= 0.0025);
  CHECK(std::abs(var[1] - 0.25) <= 0.0025);

  const std::vector<double> bad{0.5, 0.0};
  CHECK_THROWS_AS(sample_state(means, bad, rng), std::invalid_argument);
}

TEST_CASE("primal update examples") {
  const ConvexSet box = ConvexSet::box(1, 0, 9);
  // gamma_next * sigma_next^2 = 0.1, sigma_curr^2 = 0.25.
  CHECK(primal_update(Vector::Constant(1, 5.0), 2.0, Vector::Constant(1, 5.5), 0.1, 1.0, 0.5, box)[0] ==
        doctest::Approx(4.6).epsilon(1e-15));
  CHECK(primal_update(Vector::Constant(1, 5.0), 0.0, Vector::Constant(1, 7.0), 0.1, 1.0, 0.5, box)[0] == 5.0);
  // Raw value 0.1 - 0.1 * 4 * 1 * 1 = -0.3 is clamped.
  CHECK(primal_update(Vector::Constant(1, 0.1), 1.0, Vector::Constant(1, 1.1), 0.1, 1.0, 0.5, box)[0] == 0.0);
  CHECK_THROWS(primal_update(Vector::Constant(1, 0.1), 1.0, Vector::Constant(1, 0.35), 0.1, 1.0, 0.0, box));
}

TEST_CASE("dual update examples") {
  CHECK(dual_update(DualVector(Vector::Constant(1, 0.5)), Vector::Constant(1, -2.0), 0.3).values[0] == 0.0);
  CHECK(dual_update(DualVector(Vector::Constant(1, 0.5)), Vector::Zero(1), 0.3).values[0] == 0.5);
  Vector lam(2), g(2);
  lam << 1, 0;
  g << 2, -1;
  const DualVector out = dual_update(DualVector(lam), g, 0.5);
  CHECK(out.values[0] == 2.0);
  CHECK(out.values[1] == 0.0);
  CHECK_THROWS_AS(dual_update(DualVector(lam), Vector::Zero(1), 0.5), DimensionError);
}

TEST_CASE("null dynamics leave the state untouched") {
  const Schedule s = Schedule::uniform(2);
  const RunRecord coupled = run_coupled(null_game(true), s, 500, 3);
  for (long r = 0; r < coupled.rows(); ++r) {
    CHECK(coupled.mean_row(r) == coupled.initial_means);
    CHECK(coupled.dual_row(r)[0] == 0.0);
  }
  const RunRecord uncoupled = run_uncoupled(null_game(false), s, 500, 3);
  CHECK(uncoupled.final_means() == uncoupled.initial_means);
  CHECK(uncoupled.initial_means == Vector::Constant(4, 4.5));
}

TEST_CASE("runs are deterministic in the seed") {
  const GameSpec g = micro_game();
  const Schedule s = Schedule::uniform(2);
  const RunRecord a = run_coupled(g, s, 2000, 99), b = run_coupled(g, s, 2000, 99), c = run_coupled(g, s, 2000, 100);
  CHECK(a.same_trajectory(b));
  CHECK_FALSE(a.same_trajectory(c));
  const GameSpec u = drop_coupling(g);
  CHECK(run_uncoupled(u, s, 2000, 5).same_trajectory(run_uncoupled(u, s, 2000, 5)));
}

TEST_CASE("iterates stay feasible and the dual stays non-negative") {
  const auto cg = build_cournot(3, 4, 6);
  const RunRecord rec = run_coupled(cg.game, Schedule::uniform(3), 5000, 8);
  for (long r = 0; r < rec.rows(); ++r) {
    const Vector mu = rec.mean_row(r);
    CHECK(mu.minCoeff() >= 0.0);
    CHECK(mu.maxCoeff() <= 9.0);
    CHECK(rec.dual_row(r).minCoeff() >= 0.0);
  }
}

TEST_CASE("payoffs are the associated costs at the sampled state") {
  const GameSpec g = micro_game();
  const RunRecord rec = run_coupled(g, Schedule::uniform(2), 50, 12);
  for (long r = 1; r < rec.rows(); ++r) {
    const JointAction x(2, 1, rec.sample_row(r));
    const DualVector lam(Vector(rec.dual_row(r - 1)));
    for (int i = 0; i < 2; ++i) CHECK(rec.payoff_row(r)[i] == doctest::Approx(associated_cost(g, i, x, lam)).epsilon(1e-14));
    CHECK(rec.constraint_row(r)[0] == doctest::Approx(constraint_value(g, x)[0]).epsilon(1e-14));
  }
}

TEST_CASE("decoupled quadratic game converges to the targets") {
  Vector c1(2), c2(2);
  c1 << 3, -2;
  c2 << -1, 4;
  const GameSpec g = decoupled_game({c1, c2});
  Vector target(4);
  target << c1, c2;
  std::vector<double> errors;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const RunRecord rec = run_uncoupled(g, Schedule::uniform(2), 100000, derive_seed(2024, k));
    errors.push_back((rec.final_means() - target).norm() / target.norm());
  }
  CHECK(median(errors) <= 0.05);
}

TEST_CASE("mode preconditions and schedule warnings") {
  const Schedule s = Schedule::uniform(2);
  CHECK_THROWS_AS(run_coupled(drop_coupling(micro_game()), s, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_uncoupled(micro_game(), s, 10, 1), std::invalid_argument);

  std::ostringstream warnings;
  LearnerOptions opts;
  opts.warnings = &warnings;
  run_coupled(micro_game(), Schedule::uniform(2, 0.4, 0.2), 10, 1, opts);
  CHECK(warnings.str().find("2a>1") != std::string::npos);
}

TEST_CASE("initial state honours overrides") {
  LearnerOptions opts;
  opts.initial_means = Vector::Constant(2, 12.0);
  opts.initial_dual = Vector::Constant(1, 0.75);
  const LearnerState st = initial_state(micro_game(), LearnerMode::coupled, 1, opts);
  CHECK(st.means.values() == Vector::Constant(2, 9.0));
  CHECK(st.dual.values[0] == 0.75);
}
