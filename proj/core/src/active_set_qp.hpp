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

#include <optional>

#include <Eigen/Core>

namespace gnelearn::detail {

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per row of the constraint matrix, >= 0
  long iterations = 0;
};

// Primal active-set method for  min 1/2 x^T H x + q^T x  s.t.  A x <= b,
// with H symmetric positive definite and a feasible starting point.
// Returns std::nullopt if the working-set systems become singular or the
// iteration cap is hit.
std::optional<QpSolution> solve_inequality_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear,
                                              const Eigen::MatrixXd& rows, const Eigen::VectorXd& bounds,
                                              Eigen::VectorXd start);

}  // namespace gnelearn::detail
