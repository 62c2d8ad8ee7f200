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

#include <string>

#include "gnelearn/game.hpp"

namespace gnelearn {

struct KktResidual {
  double stationarity = 0.0;    // ||a - Proj_A(a - M^0_a(a, lambda))||
  double complementarity = 0.0; // |(lambda, g(a))|
  double feasibility = 0.0;     // ||max(g(a), 0)||
};

KktResidual kkt_residual(const GameSpec& game, const JointAction& a, const DualVector& lambda);

/// Candidate variational equilibrium (a*, lambda*) with its measured KKT
/// residuals. Accepted iff every residual is at most `tol`.
struct EquilibriumCertificate {
  JointAction primal;
  DualVector dual;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double feasibility = 0.0;
  double tol = 0.0;
  long iterations = 0;
  std::string method;

  bool accepted() const { return stationarity <= tol && complementarity <= tol && feasibility <= tol; }
};

/// Extragradient iteration on the extended mapping over A x R^n_+ until the
/// natural-map residual ||z - Proj(z - M^0(z))|| drops below tol / 10. The
/// step is 1/(2L) with L estimated from sampled pairs and doubled whenever a
/// step reveals a larger local Lipschitz ratio. Hitting `max_iters` returns
/// an unaccepted certificate instead of throwing.
EquilibriumCertificate solve_vi(const GameSpec& game, double tol = 1e-10, long max_iters = 2'000'000);

/// Minimises the potential of a game with symmetric mapping Jacobian over
/// A intersected with {g <= 0}. Quadratic games with box local sets and at most
/// 20 affine coupling rows are solved exactly by a primal active-set method;
/// everything else uses projected gradient with Armijo steps, evaluating the
/// potential by quadrature of the mapping along segments. Throws
/// UnsupportedOperation if the Jacobian is not symmetric (no potential exists).
EquilibriumCertificate solve_potential(const GameSpec& game, double tol = 1e-10);

// Largest Jacobian asymmetry max|J - J^T| found at a handful of points in A.
double mapping_asymmetry(const GameSpec& game);

struct DeviationReport {
  double best_improvement = 0.0;  // max over players of J_i(a*) - J_i(deviation)
  int player = -1;
  long deviations_checked = 0;
};

/// Grid search over unilateral feasible deviations: `points` per coordinate of
/// each player's box. Intended for small d (throws for points^d > 10^7).
DeviationReport deviation_check(const GameSpec& game, const JointAction& candidate, int points = 50);

}  // namespace gnelearn
