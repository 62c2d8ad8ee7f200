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

#include "gnelearn/cournot.hpp"
#include "gnelearn/errors.hpp"
#include "gnelearn/game.hpp"
#include "test_support.hpp"

using namespace gnelearn;
using gnelearn::testing::uniform_vector;

namespace {

// Direct transcription of the Cournot cost for identity Q and C.
double cournot_cost_by_hand(const Vector& a, int players, int horizon, int i, const Vector& c) {
  Vector avg = Vector::Zero(horizon);
  for (int j = 0; j < players; ++j) avg += a.segment(j * horizon, horizon);
  avg /= players;
  const Vector ai = a.segment(i * horizon, horizon);
  return ai.squaredNorm() + 2.0 * (avg + c).dot(ai);
}

GameSpec zero_game(int players, int dim) {
  const int nd = players * dim;
  std::vector<QuadraticCost> costs(players, QuadraticCost{Matrix::Zero(nd, nd), Vector::Zero(nd), 0.0});
  return make_quadratic_game("zero", players, dim, costs, std::nullopt,
                             std::vector<ConvexSet>(players, ConvexSet::box(dim, -10, 10)));
}

// J_i = 1/2 ||a^i||^2 for every player.
GameSpec half_norm_game(int players, int dim) {
  const int nd = players * dim;
  std::vector<QuadraticCost> costs;
  for (int i = 0; i < players; ++i) {
    Matrix h = Matrix::Zero(nd, nd);
    h.block(i * dim, i * dim, dim, dim).setIdentity();
    costs.push_back({h, Vector::Zero(nd), 0.0});
  }
  return make_quadratic_game("half-norm", players, dim, costs, std::nullopt,
                             std::vector<ConvexSet>(players, ConvexSet::box(dim, -10, 10)));
}

Vector fd_block(const GameSpec& g, int i, const Vector& a, double h) {
  Vector out(g.dim);
  for (int k = 0; k < g.dim; ++k) {
    Vector up = a, down = a;
    up[i * g.dim + k] += h;
    down[i * g.dim + k] -= h;
    out[k] = (g.costs[i](up) - g.costs[i](down)) / (2 * h);
  }
  return out;
}

}  // namespace

TEST_CASE("literal cournot cost at (1,1)") {
  const auto cg = build_cournot(2, 1, 3, {.offset = Vector::Constant(1, -4.0), .capacities = Vector::Constant(1, 3.0)});
  const JointAction a(2, 1, Vector::Ones(2));
  CHECK(eval_cost(cg.game, 0, a) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(eval_cost(cg.game, 0, a) == doctest::Approx(cournot_cost_by_hand(a.values(), 2, 1, 0, cg.params.offset)));
}

TEST_CASE("micro game cost and mapping") {
  const GameSpec g = micro_game();
  const JointAction ones(2, 1, Vector::Ones(2));
  CHECK(eval_cost(g, 0, ones) == doctest::Approx(-5.0));
  const Vector m = game_mapping(g, ones);
  CHECK(m[0] == doctest::Approx(-4.0));
  CHECK(m[1] == doctest::Approx(-4.0));

  const JointAction star(2, 1, Vector::Constant(2, 1.5));
  const Vector ext = extended_mapping(g, star, DualVector(Vector::Constant(1, 2.0)));
  REQUIRE(ext.size() == 3);
  CHECK(ext.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(associated_cost(g, 0, star, DualVector(Vector::Constant(1, 2.0))) == doctest::Approx(-5.25));
}

TEST_CASE("trivial cost and mapping examples") {
  const GameSpec z = zero_game(2, 2);
  std::mt19937_64 rng(1);
  const JointAction a(2, 2, uniform_vector(rng, 4, -5, 5));
  CHECK(eval_cost(z, 1, a) == 0.0);
  CHECK(game_mapping(z, a).isZero(0.0));

  const GameSpec h = half_norm_game(2, 2);
  Vector v(4);
  v << 1, 2, 3, 4;
  CHECK(game_mapping(h, JointAction(2, 2, v)).isApprox(v, 1e-15));

  // J_1 = ||a^1||^2 at a^1 = (3, 4).
  Matrix h1 = Matrix::Zero(4, 4);
  h1.topLeftCorner(2, 2) = 2 * Matrix::Identity(2, 2);
  auto sq = make_quadratic_game("sq", 2, 2, {{h1, Vector::Zero(4), 0.0}, {h1, Vector::Zero(4), 0.0}}, std::nullopt,
                                std::vector<ConvexSet>(2, ConvexSet::box(2, -9, 9)));
  Vector p(4);
  p << 3, 4, -7, 2;
  CHECK(eval_cost(sq, 0, JointAction(2, 2, p)) == doctest::Approx(25.0));
}

TEST_CASE("associated cost of the dual player") {
  const GameSpec g = micro_game();
  // a1 + a2 - 3 = -1.
  const JointAction a(2, 1, Vector::Ones(2));
  CHECK(associated_cost(g, 2, a, DualVector(Vector::Constant(1, 2.0))) == doctest::Approx(2.0));
  CHECK(associated_cost(g, 0, a, DualVector::zeros(1)) == eval_cost(g, 0, a));
}

TEST_CASE("extended mapping reductions and affinity in lambda") {
  const auto cg = build_cournot(3, 4, 11);
  const GameSpec& g = cg.game;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const JointAction a(3, 4, uniform_vector(rng, 12, 0, 9));
    const Vector at_zero = extended_mapping(g, a, DualVector::zeros(4));
    CHECK((at_zero.head(12) - game_mapping(g, a)).isZero(0.0));
    CHECK((at_zero.tail(4) + constraint_value(g, a)).isZero(0.0));

    const Vector lam = uniform_vector(rng, 4, 0, 3), delta = uniform_vector(rng, 4, 0, 1);
    const Vector shift = extended_mapping(g, a, DualVector(lam + delta)) - extended_mapping(g, a, DualVector(lam));
    CHECK((shift.head(12) - g.affine->matrix.transpose() * delta).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(shift.tail(4).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("gradient evaluators match central differences") {
  std::mt19937_64 rng(3);
  for (const GameSpec& g : {build_cournot(3, 4, 5).game, micro_game(), half_norm_game(3, 2)}) {
    CAPTURE(g.name);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector a = uniform_vector(rng, g.joint_dim(), 0.5, 8.5);
      const Vector m = game_mapping(g, JointAction(g.players, g.dim, a));
      for (int i = 0; i < g.players; ++i) {
        const Vector fd = fd_block(g, i, a, 1e-5);
        const Vector mi = m.segment(i * g.dim, g.dim);
        CHECK((fd - mi).norm() <= 1e-5 * std::max(1.0, mi.norm()));
      }
    }
  }
}

TEST_CASE("associated costs share the price term") {
  const GameSpec g = build_cournot(3, 2, 9).game;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const JointAction a(3, 2, uniform_vector(rng, 6, -2, 12));
    const DualVector lam(uniform_vector(rng, 2, 0, 5));
    const double dual_cost = associated_cost(g, 3, a, lam);
    for (int i = 0; i < 3; ++i)
      CHECK(associated_cost(g, i, a, lam) - eval_cost(g, i, a) == doctest::Approx(-dual_cost).epsilon(1e-12));
  }
}

TEST_CASE("extended mapping of a quadratic game is affine") {
  const GameSpec g = build_cournot(3, 4, 8).game;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0, 1);
  auto m0 = [&](const Vector& z) {
    return extended_mapping(g, JointAction(3, 4, z.head(12)), DualVector(Vector(z.tail(4))));
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Vector z1 = uniform_vector(rng, 16, -5, 5), z2 = uniform_vector(rng, 16, -5, 5);
    const double t = unit(rng);
    const Vector lhs = m0(t * z1 + (1 - t) * z2), rhs = t * m0(z1) + (1 - t) * m0(z2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1 + rhs.cwiseAbs().maxCoeff()));
  }
  const auto affine = affine_extended_mapping(g);
  REQUIRE(affine.has_value());
  const Vector z = uniform_vector(rng, 16, 0, 3);
  CHECK(((*affine)(z) - m0(z)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("errors") {
  const GameSpec g = micro_game();
  const JointAction a(2, 1, Vector::Ones(2));
  CHECK_THROWS_AS(eval_cost(g, 2, a), std::out_of_range);
  CHECK_THROWS_AS(eval_cost(g, -1, a), std::out_of_range);
  CHECK_THROWS_AS(associated_cost(g, 3, a, DualVector::zeros(1)), std::out_of_range);
  CHECK_THROWS_AS(eval_cost(g, 0, JointAction(2, 2)), DimensionError);
  CHECK_THROWS_AS(JointAction(2, 2, Vector::Zero(3)), DimensionError);
  CHECK_THROWS_AS(extended_mapping(g, a, DualVector::zeros(2)), DimensionError);

  GameSpec blind = g;
  blind.gradients.clear();
  CHECK_THROWS_AS(game_mapping(blind, a), UnsupportedOperation);
  GameSpec no_jac = g;
  no_jac.constraint_jacobian = {};
  CHECK_THROWS_AS(extended_mapping(no_jac, a, DualVector::zeros(1)), UnsupportedOperation);
}

TEST_CASE("uncoupled games evaluate an empty constraint") {
  const GameSpec g = drop_coupling(micro_game());
  CHECK(g.constraints == 0);
  CHECK(constraint_value(g, JointAction(2, 1, Vector::Ones(2))).size() == 0);
}
