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

#include "active_set_qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace gnelearn::detail {

namespace {

bool independent(const Eigen::MatrixXd& rows, const std::vector<Eigen::Index>& working, Eigen::Index candidate) {
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(working.size()) + 1, rows.cols());
  for (std::size_t k = 0; k < working.size(); ++k) stacked.row(static_cast<Eigen::Index>(k)) = rows.row(working[k]);
  stacked.row(stacked.rows() - 1) = rows.row(candidate);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(stacked);
  lu.setThreshold(1e-10);
  return lu.rank() == stacked.rows();
}

}  // namespace

std::optional<QpSolution> solve_inequality_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear,
                                              const Eigen::MatrixXd& rows, const Eigen::VectorXd& bounds,
                                              Eigen::VectorXd start) {
  const Eigen::Index n = hessian.rows();
  const Eigen::Index m = rows.rows();
  const double scale = 1.0 + start.cwiseAbs().maxCoeff();
  const double active_tol = 1e-9 * scale;

  std::vector<Eigen::Index> working;
  for (Eigen::Index j = 0; j < m; ++j)
    if (std::abs(rows.row(j).dot(start) - bounds[j]) <= active_tol && independent(rows, working, j))
      working.push_back(j);

  Eigen::VectorXd x = std::move(start);
  const long cap = 50 * (m + n) + 100;
  for (long iter = 1; iter <= cap; ++iter) {
    const auto w = static_cast<Eigen::Index>(working.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + w, n + w);
    kkt.topLeftCorner(n, n) = hessian;
    for (Eigen::Index k = 0; k < w; ++k) {
      kkt.block(0, n + k, n, 1) = rows.row(working[static_cast<std::size_t>(k)]).transpose();
      kkt.block(n + k, 0, 1, n) = rows.row(working[static_cast<std::size_t>(k)]);
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + w);
    rhs.head(n) = -(hessian * x + linear);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd p = sol.head(n);
    const Eigen::VectorXd mu = sol.tail(w);

    if (p.norm() <= 1e-12 * scale) {
      Eigen::Index drop = -1;
      double most_negative = -1e-12;
      for (Eigen::Index k = 0; k < w; ++k)
        if (mu[k] < most_negative) {
          most_negative = mu[k];
          drop = k;
        }
      if (drop < 0) {
        QpSolution out{x, Eigen::VectorXd::Zero(m), iter};
        for (Eigen::Index k = 0; k < w; ++k) out.multipliers[working[static_cast<std::size_t>(k)]] = std::max(0.0, mu[k]);
        return out;
      }
      working.erase(working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::find(working.begin(), working.end(), j) != working.end()) continue;
      const double slope = rows.row(j).dot(p);
      if (slope <= 1e-14) continue;
      const double reach = std::max(0.0, (bounds[j] - rows.row(j).dot(x)) / slope);
      if (reach < alpha) {
        alpha = reach;
        blocking = j;
      }
    }
    x += alpha * p;
    if (blocking >= 0) working.push_back(blocking);
  }
  return std::nullopt;
}

}  // namespace gnelearn::detail
