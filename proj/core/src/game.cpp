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

#include "gnelearn/game.hpp"

#include <sstream>
#include <stdexcept>

#include "gnelearn/errors.hpp"

namespace gnelearn {

JointAction::JointAction(int players, int dim)
    : players_(players), dim_(dim), values_(Vector::Zero(static_cast<Eigen::Index>(players) * dim)) {}

JointAction::JointAction(int players, int dim, Vector values)
    : players_(players), dim_(dim), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(players) * dim) {
    std::ostringstream msg;
    msg << "joint action has " << values_.size() << " entries, expected " << players << "*" << dim;
    throw DimensionError(msg.str());
  }
}

void GameSpec::validate() const {
  if (players <= 0 || dim <= 0) throw DimensionError("game needs players >= 1 and dim >= 1");
  if (constraints < 0) throw DimensionError("negative constraint count");
  if (static_cast<int>(costs.size()) != players) throw DimensionError("one cost evaluator per player required");
  if (!gradients.empty() && static_cast<int>(gradients.size()) != players)
    throw DimensionError("gradient evaluators must be given for every player or none");
  if (constraints > 0 && !constraint) throw DimensionError("coupled game without a constraint evaluator");
  if (static_cast<int>(local_sets.size()) != players) throw DimensionError("one local set per player required");
  for (const auto& s : local_sets)
    if (s.dim() != dim) throw DimensionError("local set dimension differs from player dimension");
  if (quadratic) {
    if (static_cast<int>(quadratic->size()) != players) throw DimensionError("quadratic structure size");
    for (const auto& q : *quadratic)
      if (q.hessian.rows() != joint_dim() || q.hessian.cols() != joint_dim() || q.linear.size() != joint_dim())
        throw DimensionError("quadratic cost shape differs from joint dimension");
  }
  if (affine && (affine->matrix.rows() != constraints || affine->matrix.cols() != joint_dim() ||
                 affine->offset.size() != constraints))
    throw DimensionError("affine constraint shape differs from game layout");
}

namespace {

void check_action(const GameSpec& game, const JointAction& a) {
  if (a.players() != game.players || a.dim() != game.dim) {
    std::ostringstream msg;
    msg << "joint action layout " << a.players() << "x" << a.dim() << " does not match game "
        << game.players << "x" << game.dim;
    throw DimensionError(msg.str());
  }
}

void check_dual(const GameSpec& game, const DualVector& lambda) {
  if (lambda.size() != game.constraints) throw DimensionError("dual vector length differs from constraint count");
}

void check_player(const GameSpec& game, int player, int upper) {
  if (player < 0 || player >= upper) {
    std::ostringstream msg;
    msg << "player index " << player << " outside [0, " << upper << ")";
    throw std::out_of_range(msg.str());
  }
  (void)game;
}

Matrix constraint_jacobian(const GameSpec& game, const Vector& a) {
  if (game.constraints == 0) return Matrix::Zero(0, game.joint_dim());
  if (!game.constraint_jacobian) throw UnsupportedOperation("game '" + game.name + "' has no constraint Jacobian");
  return game.constraint_jacobian(a);
}

}  // namespace

GameSpec make_quadratic_game(std::string name, int players, int dim, std::vector<QuadraticCost> costs,
                             std::optional<AffineConstraint> coupling, std::vector<ConvexSet> local_sets) {
  GameSpec game;
  game.name = std::move(name);
  game.players = players;
  game.dim = dim;
  game.constraints = coupling ? static_cast<int>(coupling->offset.size()) : 0;
  game.local_sets = std::move(local_sets);
  game.quadratic = std::move(costs);

  for (int i = 0; i < players; ++i) {
    const QuadraticCost& q = (*game.quadratic)[i];
    game.costs.push_back([q](const Vector& a) { return q.value(a); });
    // Rows of the player's own block of the gradient.
    Matrix rows = 0.5 * (q.hessian.middleRows(static_cast<Eigen::Index>(i) * dim, dim) +
                         q.hessian.middleCols(static_cast<Eigen::Index>(i) * dim, dim).transpose());
    Vector lin = q.linear.segment(static_cast<Eigen::Index>(i) * dim, dim);
    game.gradients.push_back([rows, lin](const Vector& a) -> Vector { return rows * a + lin; });
  }

  if (coupling) {
    game.affine = std::move(coupling);
    const AffineConstraint g = *game.affine;
    game.constraint = [g](const Vector& a) -> Vector { return g.matrix * a - g.offset; };
    game.constraint_jacobian = [g](const Vector&) -> Matrix { return g.matrix; };
  }
  game.validate();
  return game;
}

GameSpec drop_coupling(GameSpec game) {
  game.constraints = 0;
  game.constraint = {};
  game.constraint_jacobian = {};
  game.affine.reset();
  game.name += " (uncoupled)";
  return game;
}

double eval_cost(const GameSpec& game, int player, const JointAction& a) {
  check_player(game, player, game.players);
  check_action(game, a);
  return game.costs[player](a.values());
}

Vector constraint_value(const GameSpec& game, const JointAction& a) {
  check_action(game, a);
  if (game.constraints == 0) return Vector(0);
  return game.constraint(a.values());
}

Vector game_mapping(const GameSpec& game, const JointAction& a) {
  check_action(game, a);
  if (!game.has_gradients()) throw UnsupportedOperation("game '" + game.name + "' has no gradient evaluators");
  Vector out(game.joint_dim());
  for (int i = 0; i < game.players; ++i) out.segment(static_cast<Eigen::Index>(i) * game.dim, game.dim) =
      game.gradients[i](a.values());
  return out;
}

Vector extended_mapping(const GameSpec& game, const JointAction& a, const DualVector& lambda) {
  check_dual(game, lambda);
  Vector out(game.joint_dim() + game.constraints);
  out.head(game.joint_dim()) = game_mapping(game, a);
  if (game.constraints > 0) {
    const Matrix jac = constraint_jacobian(game, a.values());
    out.head(game.joint_dim()) += jac.transpose() * lambda.values;
    out.tail(game.constraints) = -game.constraint(a.values());
  }
  return out;
}

double associated_cost(const GameSpec& game, int player, const JointAction& a, const DualVector& lambda) {
  check_player(game, player, game.players + 1);
  check_action(game, a);
  check_dual(game, lambda);
  const double price = game.constraints > 0 ? lambda.values.dot(game.constraint(a.values())) : 0.0;
  if (player == game.players) return -price;
  return game.costs[player](a.values()) + price;
}

std::optional<AffineMap> affine_game_mapping(const GameSpec& game) {
  if (!game.quadratic) return std::nullopt;
  const int nd = game.joint_dim();
  AffineMap map{Matrix::Zero(nd, nd), Vector::Zero(nd)};
  for (int i = 0; i < game.players; ++i) {
    const QuadraticCost& q = (*game.quadratic)[i];
    const Eigen::Index off = static_cast<Eigen::Index>(i) * game.dim;
    map.jacobian.middleRows(off, game.dim) =
        0.5 * (q.hessian.middleRows(off, game.dim) + q.hessian.middleCols(off, game.dim).transpose());
    map.offset.segment(off, game.dim) = q.linear.segment(off, game.dim);
  }
  return map;
}

std::optional<AffineMap> affine_extended_mapping(const GameSpec& game) {
  auto base = affine_game_mapping(game);
  if (!base) return std::nullopt;
  if (game.constraints > 0 && !game.affine) return std::nullopt;
  const int nd = game.joint_dim();
  const int n = game.constraints;
  AffineMap map{Matrix::Zero(nd + n, nd + n), Vector::Zero(nd + n)};
  map.jacobian.topLeftCorner(nd, nd) = base->jacobian;
  map.offset.head(nd) = base->offset;
  if (n > 0) {
    map.jacobian.topRightCorner(nd, n) = game.affine->matrix.transpose();
    map.jacobian.bottomLeftCorner(n, nd) = -game.affine->matrix;
    map.offset.tail(n) = game.affine->offset;
  }
  return map;
}

}  // namespace gnelearn
