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

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gnelearn/cournot.hpp"
#include "gnelearn/diagnostics.hpp"
#include "gnelearn/errors.hpp"
#include "test_support.hpp"

using namespace gnelearn;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

// One player, one coordinate, J = x^2 and optionally g = x - 1.
GameSpec square_game(bool coupled) {
  std::optional<AffineConstraint> g;
  if (coupled) g = AffineConstraint{Matrix::Ones(1, 1), scalar(1.0)};
  return make_quadratic_game("square", 1, 1, {{Matrix::Constant(1, 1, 2.0), Vector::Zero(1), 0.0}}, g,
                             {ConvexSet::box(1, -10, 10)});
}

GameSpec constant_game(double value) {
  return make_quadratic_game("const", 1, 1, {{Matrix::Zero(1, 1), Vector::Zero(1), value}}, std::nullopt,
                             {ConvexSet::box(1, -10, 10)});
}

GameSpec quartic_game() {
  GameSpec g;
  g.name = "quartic";
  g.players = 1;
  g.dim = 1;
  g.costs = {[](const Vector& x) { return std::pow(x[0], 4); }};
  g.gradients = {[](const Vector& x) { return scalar(4 * std::pow(x[0], 3)); }};
  g.local_sets = {ConvexSet::box(1, -10, 10)};
  return g;
}

MixedQuery query(double mu, double sigma, long samples, std::uint64_t seed, Vector dual = Vector(0)) {
  MixedQuery q;
  q.means = scalar(mu);
  q.sigma = scalar(sigma);
  q.dual = std::move(dual);
  q.samples = samples;
  q.seed = seed;
  return q;
}

}  // namespace

TEST_CASE("mixed cost of a square") {
  const Estimate e = mixed_cost(query(1.5, 0.5, 1000000, 3), square_game(false));
  REQUIRE(e.closed_form.has_value());
  CHECK(*e.closed_form == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(std::abs(e.mean - 2.5) <= 3 * e.stderr_);

  const Estimate c = mixed_cost(query(0.3, 2.0, 1000, 3), constant_game(7.25));
  CHECK(c.mean == 7.25);
  CHECK(c.stderr_ == 0.0);
}

TEST_CASE("mixed cost is affine in the dual") {
  const GameSpec g = square_game(true);
  const Estimate one = mixed_cost(query(1.5, 0.5, 20000, 9, scalar(0.7)), g);
  const Estimate two = mixed_cost(query(1.5, 0.5, 20000, 9, scalar(1.4)), g);
  MixedQuery dual_player = query(1.5, 0.5, 20000, 9, scalar(0.7));
  dual_player.player = 1;
  const Estimate price = mixed_cost(dual_player, g);
  // Same draws: the gap equals the empirical mean of (lambda, g(x)).
  CHECK(two.mean - one.mean == doctest::Approx(-price.mean).epsilon(1e-9));
  CHECK(*two.closed_form - *one.closed_form == doctest::Approx(0.7 * (1.5 - 1.0)));
}

TEST_CASE("score estimator is unbiased for the mixed gradient") {
  const ScoreGradientReport r = score_gradient_check(query(1.5, 0.5, 1000000, 11, scalar(0.4)), square_game(true));
  // Target: d/dmu (mu^2 + sigma^2 + lambda (mu - 1)) = 2 mu + lambda.
  CHECK(r.target_kind == "closed-form");
  CHECK(r.target[0] == doctest::Approx(3.4));
  CHECK(r.pass);
  REQUIRE(r.constraint_mean.has_value());
  CHECK((*r.constraint_target)[0] == doctest::Approx(0.5));
  CHECK(r.dual_pass);

  const ScoreGradientReport plain = score_gradient_check(query(1.5, 0.5, 1000000, 12), square_game(false));
  CHECK(plain.target[0] == doctest::Approx(3.0));
  CHECK(std::abs(plain.estimate[0] - 3.0) <= 3 * plain.stderr_[0]);

  const ScoreGradientReport flat = score_gradient_check(query(0.0, 1.0, 100000, 13), constant_game(2.0));
  CHECK(flat.target[0] == 0.0);
  CHECK(flat.pass);
}

TEST_CASE("score check falls back to differences of the mixed cost") {
  // E[x^4] = mu^4 + 6 mu^2 s^2 + 3 s^4, so the gradient is 4 mu^3 + 12 mu s^2.
  const ScoreGradientReport r = score_gradient_check(query(1.0, 0.5, 400000, 21), quartic_game());
  CHECK(r.target_kind == "finite-difference");
  CHECK(r.target[0] == doctest::Approx(4.0 + 12 * 0.25).epsilon(0.02));
  CHECK(r.pass);
}

TEST_CASE("bias vanishes on affine mappings") {
  const auto cg = build_cournot(3, 4, 4);
  for (double sigma : {1.0, 0.5, 0.1}) {
    MixedQuery q;
    q.player = 1;
    q.means = Vector::Constant(12, 2.0);
    q.sigma = Vector::Constant(3, sigma);
    q.dual = Vector::Constant(4, 0.3);
    q.samples = 20000;
    q.seed = 5;
    const BiasReport b = bias_term(q, cg.game);
    CAPTURE(sigma);
    CHECK(b.within_noise);
  }
}

TEST_CASE("quartic bias matches its Gaussian moment") {
  double previous = 0.0;
  for (double sigma : {0.4, 0.2}) {
    const BiasReport b = bias_term(query(1.0, sigma, 1000000, 31), quartic_game());
    CHECK(std::abs(b.estimate[0] - 12 * sigma * sigma) <= 3 * b.stderr_[0]);
    if (previous > 0.0) CHECK(b.estimate[0] / previous == doctest::Approx(0.25).epsilon(0.1));
    previous = b.estimate[0];
  }
}

TEST_CASE("monotonicity of the worked instances") {
  const GameSpec g = micro_game();
  const VectorMap m = [&](const Vector& a) { return game_mapping(g, JointAction(2, 1, a)); };
  const MonotonicityReport strong = monotonicity_classify(m, g.local_sets);
  CHECK(strong.affine);
  CHECK(strong.verdict == MonotonicityClass::strong);
  CHECK(strong.kappa == doctest::Approx(2.0).epsilon(1e-12));

  const VectorMap ext = [&](const Vector& z) {
    return extended_mapping(g, JointAction(2, 1, z.head(2)), DualVector(Vector(z.tail(1))));
  };
  std::vector<ConvexSet> domain = g.local_sets;
  domain.push_back(ConvexSet::orthant(1));
  const MonotonicityReport mono = monotonicity_classify(ext, domain);
  CHECK(mono.verdict == MonotonicityClass::monotone);
  CHECK(mono.kappa == 0.0);

  const std::vector<ConvexSet> cube{ConvexSet::box(3, -1, 1)};
  const MonotonicityReport id = monotonicity_classify([](const Vector& x) { return x; }, cube);
  CHECK(id.verdict == MonotonicityClass::strong);
  CHECK(id.kappa == doctest::Approx(1.0));
}

TEST_CASE("monotonicity of nonlinear and reversed mappings") {
  const std::vector<ConvexSet> line{ConvexSet::box(1, -2, 2)};
  const MonotonicityReport cubic = monotonicity_classify([](const Vector& x) { return Vector(x.array().cube()); }, line);
  CHECK_FALSE(cubic.affine);
  CHECK(cubic.verdict == MonotonicityClass::strict);

  const MonotonicityReport wavy = monotonicity_classify(
      [](const Vector& x) { return scalar(x[0] * (2 + std::sin(5 * x[0]))); }, line);
  CHECK(wavy.verdict == MonotonicityClass::pseudo_undetermined);

  const MonotonicityReport reversed = monotonicity_classify([](const Vector& x) { return Vector(-x); }, line);
  CHECK(reversed.verdict == MonotonicityClass::violated);
  CHECK(reversed.kappa == doctest::Approx(-1.0));
}

TEST_CASE("random affine maps with prescribed spectra") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dims(2, 6);
  int misclassified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dims(rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(Matrix(gnelearn::testing::normal_vector(rng, n * n).reshaped(n, n)))
                         .householderQ();
    Vector spectrum = gnelearn::testing::uniform_vector(rng, n, 0.5, 3.0);
    MonotonicityClass expected = MonotonicityClass::strong;
    if (trial % 3 == 1) {
      spectrum[0] = 0.0;
      expected = MonotonicityClass::monotone;
    } else if (trial % 3 == 2) {
      spectrum[0] = -0.5;
      expected = MonotonicityClass::violated;
    }
    const Matrix skew_seed(gnelearn::testing::normal_vector(rng, n * n).reshaped(n, n));
    const Matrix a = q * spectrum.asDiagonal() * q.transpose() + (skew_seed - skew_seed.transpose());
    const Vector b = gnelearn::testing::normal_vector(rng, n);
    const std::vector<ConvexSet> domain{ConvexSet::box(n, -5, 5)};
    const MonotonicityReport r = monotonicity_classify([&](const Vector& x) { return Vector(a * x + b); }, domain, 2000);
    bool ok = r.verdict == expected;
    if (expected == MonotonicityClass::violated) ok = r.verdict != MonotonicityClass::strong && r.verdict != MonotonicityClass::monotone && r.verdict != MonotonicityClass::strict;
    if (expected == MonotonicityClass::strong) ok = ok && std::abs(r.kappa - spectrum.minCoeff()) <= 1e-9;
    if (!ok) ++misclassified;
  }
  CHECK(misclassified == 0);
}

TEST_CASE("log-log slope and rate fit") {
  std::vector<double> x, y;
  for (int k = 1; k <= 50; ++k) {
    x.push_back(k * 10.0);
    y.push_back(3.0 * std::pow(k * 10.0, -0.7));
  }
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK_THROWS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}));

  const Schedule s = Schedule::uniform(1);
  std::vector<std::vector<double>> decaying(20), flat(20, std::vector<double>(20000, 0.3));
  for (auto& curve : decaying)
    for (long t = 1; t <= 20000; ++t) curve.push_back(5.0 * std::pow(static_cast<double>(t), -0.6));
  const RateFit good = rate_fit_curves(decaying, s);
  CHECK(good.theoretical_slope == doctest::Approx(-0.6));
  CHECK(good.slope == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK(good.pass);
  CHECK(good.times.front() == 1000);
  CHECK(good.times.back() == 20000);

  const RateFit bad = rate_fit_curves(flat, s);
  CHECK(bad.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(bad.pass);

  std::vector<std::vector<double>> few(5, std::vector<double>(20000, 1.0));
  CHECK_THROWS(rate_fit_curves(few, s));
}

TEST_CASE("recursion check agrees with a direct simulation") {
  // Independent simulation in long double with its own indexing.
  auto direct = [](double a0, double kappa, double psi, double c, long horizon) {
    const long double bound_c = std::max<long double>(a0, psi / (kappa - 1.0L));
    long double a = a0;
    bool holds = true;
    for (long t = 1; t <= horizon; ++t) {
      if (a > bound_c / std::pow(static_cast<long double>(t), c - 1.0L) * (1 + 1e-12L)) holds = false;
      const long double factor = std::max<long double>(0.0L, 1.0L - kappa / static_cast<long double>(t));
      a = factor * a + psi / std::pow(static_cast<long double>(t), static_cast<long double>(c));
    }
    return holds;
  };
  for (double kappa : {1.1, 2.0, 5.0})
    for (double c : {1.2, 1.6, 2.0})
      for (double a0 : {0.1, 1.0, 10.0}) {
        CAPTURE(kappa);
        CAPTURE(c);
        CAPTURE(a0);
        const RecursionReport r = recursion_bound_check({a0, kappa, 1.0, c}, 100000);
        CHECK(r.holds == direct(a0, kappa, 1.0, c, 100000));
        CHECK(r.constant == doctest::Approx(std::max(a0, 1.0 / (kappa - 1.0))));
      }

  // Here C = psi, while a_2 = psi exceeds C / 2, so the bound only holds for t > kappa.
  const RecursionReport tiny = recursion_bound_check({0.0, 2.0, 1e-12, 2.0}, 1000000);
  CHECK(tiny.holds == direct(0.0, 2.0, 1e-12, 2.0, 1000000));
  CHECK(tiny.holds_beyond_kappa);
  CHECK(tiny.first_violation == 2);

  const RecursionReport example = recursion_bound_check({1.0, 2.0, 1.0, 2.0}, 1000000);
  CHECK(example.holds_beyond_kappa);
  CHECK(example.constant == 1.0);

  CHECK_THROWS(recursion_bound_check({1.0, 1.0, 1.0, 2.0}, 10));
  CHECK_THROWS(recursion_bound_check({1.0, 2.0, 0.0, 2.0}, 10));
  CHECK_THROWS(recursion_bound_check({1.0, 2.0, 1.0, 2.5}, 10));
  CHECK_THROWS(recursion_bound_check({-1.0, 2.0, 1.0, 2.0}, 10));
  CHECK_THROWS(recursion_bound_check({1.0, 2.0, 1.0, 2.0}, 1));
}

TEST_CASE("relative error") {
  Vector star(2), mu(2);
  star << 1.5, 1.5;
  mu << 1.6, 1.4;
  CHECK(relative_error(star, star) == 0.0);
  CHECK(relative_error(2 * star, star) == doctest::Approx(1.0));
  CHECK(relative_error(mu, star) == doctest::Approx(std::sqrt(0.02) / std::sqrt(4.5)));
  CHECK_THROWS_AS(relative_error(mu, Vector::Zero(2)), std::domain_error);
}
