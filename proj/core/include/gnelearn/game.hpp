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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gnelearn/geometry.hpp"

namespace gnelearn {

// Stacked joint action a = [a^1, ..., a^N], each block in R^d.
class JointAction {
 public:
  JointAction() = default;
  JointAction(int players, int dim);
  JointAction(int players, int dim, Vector values);

  int players() const { return players_; }
  int dim() const { return dim_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  auto block(int i) const { return values_.segment(static_cast<Eigen::Index>(i) * dim_, dim_); }
  auto block(int i) { return values_.segment(static_cast<Eigen::Index>(i) * dim_, dim_); }

 private:
  int players_ = 0;
  int dim_ = 0;
  Vector values_;
};

// Multiplier of the coupling constraint g(a) <= 0.
struct DualVector {
  Vector values;

  DualVector() = default;
  explicit DualVector(Vector v) : values(std::move(v)) {}
  static DualVector zeros(int n) { return DualVector(Vector::Zero(n)); }
  int size() const { return static_cast<int>(values.size()); }
};

using CostFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

// J(a) = 1/2 a^T hessian a + linear^T a + constant over the full joint action.
struct QuadraticCost {
  Matrix hessian;
  Vector linear;
  double constant = 0.0;

  double value(const Vector& a) const { return 0.5 * a.dot(hessian * a) + linear.dot(a) + constant; }
};

// g(a) = matrix a - offset.
struct AffineConstraint {
  Matrix matrix;
  Vector offset;
};

/// A convex game with N players acting in R^d and n jointly convex coupling
/// constraints g(a) <= 0. Cost evaluators are defined on all of R^{Nd}.
/// Gradient evaluators and the constraint Jacobian are optional; the learner
/// never touches them.
struct GameSpec {
  std::string name;
  int players = 0;
  int dim = 0;
  int constraints = 0;

  std::vector<CostFn> costs;
  std::vector<GradientFn> gradients;  // d/da^i J_i, empty when unavailable

  ConstraintFn constraint;           // R^{Nd} -> R^n, may be empty when n == 0
  JacobianFn constraint_jacobian;    // n x Nd, optional

  std::vector<ConvexSet> local_sets;
  bool quadratic_growth = true;      // user-declared growth condition on J_i

  // Structure known to the builder; enables closed forms and exact solvers.
  std::optional<std::vector<QuadraticCost>> quadratic;
  std::optional<AffineConstraint> affine;

  int joint_dim() const { return players * dim; }
  bool coupled() const { return constraints > 0; }
  bool has_gradients() const { return static_cast<int>(gradients.size()) == players; }
  bool has_constraint_jacobian() const { return constraints == 0 || static_cast<bool>(constraint_jacobian); }

  // Throws DimensionError when the pieces disagree with (players, dim, constraints).
  void validate() const;
};

// Builds a game with quadratic costs (and optionally affine coupling) with all
// evaluators, gradients and Jacobians filled in analytically.
GameSpec make_quadratic_game(std::string name, int players, int dim, std::vector<QuadraticCost> costs,
                             std::optional<AffineConstraint> coupling, std::vector<ConvexSet> local_sets);

// The same game with its coupling constraint removed.
GameSpec drop_coupling(GameSpec game);

double eval_cost(const GameSpec& game, int player, const JointAction& a);

Vector constraint_value(const GameSpec& game, const JointAction& a);

// M(a): block i is d/da^i J_i(a). Throws UnsupportedOperation without gradients.
Vector game_mapping(const GameSpec& game, const JointAction& a);

// M^0(a, lambda) = [M_i(a) + (d g/d a^i)^T lambda ..., -g(a)].
Vector extended_mapping(const GameSpec& game, const JointAction& a, const DualVector& lambda);

// Cost of player i in the associated game: players 0..N-1 pay J_i + (lambda, g),
// the dual player (index N) pays -(lambda, g).
double associated_cost(const GameSpec& game, int player, const JointAction& a, const DualVector& lambda);

// For quadratic games: M(a) = jacobian * a + offset.
struct AffineMap {
  Matrix jacobian;
  Vector offset;

  Vector operator()(const Vector& z) const { return jacobian * z + offset; }
};

std::optional<AffineMap> affine_game_mapping(const GameSpec& game);
// Extended mapping over z = (a, lambda) when costs are quadratic and g affine.
std::optional<AffineMap> affine_extended_mapping(const GameSpec& game);

}  // namespace gnelearn
