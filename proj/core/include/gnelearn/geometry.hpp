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
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace gnelearn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Compact axis-aligned box {x : lower <= x <= upper}.
struct Box {
  Vector lower;
  Vector upper;
};

struct NonnegativeOrthant {
  int dim = 0;
};

struct Ball {
  Vector center;
  double radius = 0.0;
};

// {x : normal_r . x <= offset_r for every row r}.
struct HalfspaceIntersection {
  Matrix normals;  // one row per halfspace
  Vector offsets;
};

/// A closed convex set in R^d with an exact or tolerance-certified Euclidean
/// projection. Construct through the named factories, which validate shapes.
class ConvexSet {
 public:
  using Variant = std::variant<Box, NonnegativeOrthant, Ball, HalfspaceIntersection>;

  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet box(int dim, double lower, double upper);
  static ConvexSet orthant(int dim);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet halfspaces(Matrix normals, Vector offsets);

  int dim() const;
  bool bounded() const;
  bool contains(const Vector& p, double tol = 0.0) const;

  // A point inside the set used to seed searches (box midpoint, ball centre, ...).
  Vector anchor() const;

  const Variant& shape() const { return shape_; }

 private:
  explicit ConvexSet(Variant shape) : shape_(std::move(shape)) {}
  Variant shape_;
};

struct DykstraOptions {
  double tol = 1e-10;
  long max_sweeps = 100000;
};

struct ProjectionReport {
  Vector point;
  long sweeps = 0;          // 0 for closed-form projections
  double residual = 0.0;    // last sweep's fixed-point residual
};

// Euclidean projection. Closed form for Box, NonnegativeOrthant and Ball;
// Dykstra's alternating projections for HalfspaceIntersection (throws
// ConvergenceError if the sweep cap is reached).
Vector project(const ConvexSet& set, const Vector& p, const DykstraOptions& opts = {});
ProjectionReport project_with_report(const ConvexSet& set, const Vector& p,
                                     const DykstraOptions& opts = {});

// Blockwise projection of a stacked vector onto A_1 x ... x A_N.
Vector project_blocks(std::span<const ConvexSet> sets, const Vector& p);

using ConstraintFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

struct SlaterOptions {
  double margin = 1e-9;
  int restarts = 8;
  int iterations = 2000;
  std::uint64_t seed = 0x5eed;
};

/// Searches for a point of A_1 x ... x A_N with max_j g_j(x) < -margin by
/// projected subgradient descent on max_j g_j from several starts. The
/// Jacobian is optional; central differences are used without it.
/// std::nullopt means no certificate was found, not that none exists.
std::optional<Vector> slater_point(std::span<const ConvexSet> sets, const ConstraintFn& g,
                                   const JacobianFn& jacobian = {},
                                   const SlaterOptions& opts = {});

}  // namespace gnelearn
