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

#include "gnelearn/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <variant>

#include <Eigen/Dense>

#include "active_set_qp.hpp"
#include "gnelearn/errors.hpp"

namespace gnelearn {

namespace {

constexpr int kMaxEnumeratedRows = 20;

Vector random_point(std::span<const ConvexSet> sets, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index total = 0;
  for (const auto& s : sets) total += s.dim();
  Vector out(total);
  Eigen::Index offset = 0;
  for (const auto& s : sets) {
    Vector block = s.anchor();
    if (const auto* b = std::get_if<Box>(&s.shape())) {
      for (Eigen::Index k = 0; k < block.size(); ++k) block[k] = b->lower[k] + unit(rng) * (b->upper[k] - b->lower[k]);
    } else {
      for (Eigen::Index k = 0; k < block.size(); ++k) block[k] += normal(rng);
      block = project(s, block);
    }
    out.segment(offset, s.dim()) = block;
    offset += s.dim();
  }
  return out;
}

struct ExtendedProblem {
  const GameSpec& game;
  int nd;
  int n;

  Vector operator()(const Vector& z) const {
    return extended_mapping(game, JointAction(game.players, game.dim, z.head(nd)), DualVector(Vector(z.tail(n))));
  }
  Vector project(const Vector& z) const {
    Vector out(nd + n);
    out.head(nd) = project_blocks(game.local_sets, z.head(nd));
    out.tail(n) = z.tail(n).cwiseMax(0.0);
    return out;
  }
};

EquilibriumCertificate certify(const GameSpec& game, const Vector& a, const Vector& lambda, double tol, long iters,
                               std::string method) {
  EquilibriumCertificate cert;
  cert.primal = JointAction(game.players, game.dim, a);
  cert.dual = DualVector(lambda);
  const KktResidual r = kkt_residual(game, cert.primal, cert.dual);
  cert.stationarity = r.stationarity;
  cert.complementarity = r.complementarity;
  cert.feasibility = r.feasibility;
  cert.tol = tol;
  cert.iterations = iters;
  cert.method = std::move(method);
  return cert;
}

bool polyhedral_local_sets(const GameSpec& game) {
  return std::all_of(game.local_sets.begin(), game.local_sets.end(), [](const ConvexSet& s) {
    return !std::holds_alternative<Ball>(s.shape());
  });
}

// Halfspace description of A (box, orthant and halfspace blocks) stacked with
// the affine coupling rows. Coupling rows come last.
std::pair<Matrix, Vector> polyhedron_rows(const GameSpec& game, bool with_coupling) {
  const int nd = game.joint_dim();
  std::vector<std::pair<Vector, double>> rows;
  for (int i = 0; i < game.players; ++i) {
    const Eigen::Index off = static_cast<Eigen::Index>(i) * game.dim;
    const auto& shape = game.local_sets[i].shape();
    if (const auto* b = std::get_if<Box>(&shape)) {
      for (int k = 0; k < game.dim; ++k) {
        Vector up = Vector::Zero(nd);
        up[off + k] = 1.0;
        rows.emplace_back(up, b->upper[k]);
        rows.emplace_back(-up, -b->lower[k]);
      }
    } else if (std::holds_alternative<NonnegativeOrthant>(shape)) {
      for (int k = 0; k < game.dim; ++k) {
        Vector down = Vector::Zero(nd);
        down[off + k] = -1.0;
        rows.emplace_back(down, 0.0);
      }
    } else if (const auto* h = std::get_if<HalfspaceIntersection>(&shape)) {
      for (Eigen::Index r = 0; r < h->normals.rows(); ++r) {
        Vector row = Vector::Zero(nd);
        row.segment(off, game.dim) = h->normals.row(r).transpose();
        rows.emplace_back(row, h->offsets[r]);
      }
    } else {
      throw UnsupportedOperation("ball-shaped local sets have no halfspace description");
    }
  }
  if (with_coupling && game.constraints > 0) {
    for (int j = 0; j < game.constraints; ++j)
      rows.emplace_back(game.affine->matrix.row(j).transpose(), game.affine->offset[j]);
  }
  Matrix a(static_cast<Eigen::Index>(rows.size()), nd);
  Vector b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = rows[r].first.transpose();
    b[static_cast<Eigen::Index>(r)] = rows[r].second;
  }
  return {a, b};
}

// Nonnegative multipliers for the coupling rows that best explain stationarity
// on coordinates strictly inside A.
Vector recover_multipliers(const GameSpec& game, const Vector& a) {
  const int n = game.constraints;
  if (n == 0) return Vector(0);
  const JointAction action(game.players, game.dim, a);
  const Vector mapping = game_mapping(game, action);
  const Matrix jac = game.constraint_jacobian(a);
  const Vector g = game.constraint(a);

  std::vector<Eigen::Index> free;
  for (int i = 0; i < game.players; ++i) {
    const auto* b = std::get_if<Box>(&game.local_sets[i].shape());
    for (int k = 0; k < game.dim; ++k) {
      const Eigen::Index idx = static_cast<Eigen::Index>(i) * game.dim + k;
      if (b && (a[idx] - b->lower[k] <= 1e-9 || b->upper[k] - a[idx] <= 1e-9)) continue;
      free.push_back(idx);
    }
  }
  Matrix jf(static_cast<Eigen::Index>(free.size()), n);
  Vector mf(static_cast<Eigen::Index>(free.size()));
  for (std::size_t r = 0; r < free.size(); ++r) {
    jf.row(static_cast<Eigen::Index>(r)) = jac.col(free[r]).transpose();
    mf[static_cast<Eigen::Index>(r)] = mapping[free[r]];
  }
  Vector lambda = Vector::Zero(n);
  const double lip = std::max(1e-12, (jf.transpose() * jf).norm());
  for (int it = 0; it < 20000; ++it) {
    Vector grad = jf.transpose() * (mf + jf * lambda);
    Vector next = (lambda - grad / lip).cwiseMax(0.0);
    for (int j = 0; j < n; ++j)
      if (g[j] < -1e-7) next[j] = 0.0;
    if ((next - lambda).norm() <= 1e-15 * (1.0 + lambda.norm())) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace

KktResidual kkt_residual(const GameSpec& game, const JointAction& a, const DualVector& lambda) {
  const Vector ext = extended_mapping(game, a, lambda);
  KktResidual r;
  const Vector& values = a.values();
  r.stationarity = (values - project_blocks(game.local_sets, values - ext.head(game.joint_dim()))).norm();
  if (game.constraints > 0) {
    const Vector g = game.constraint(values);
    r.complementarity = std::abs(lambda.values.dot(g));
    r.feasibility = g.cwiseMax(0.0).norm();
  }
  return r;
}

EquilibriumCertificate solve_vi(const GameSpec& game, double tol, long max_iters) {
  game.validate();
  const int nd = game.joint_dim();
  const int n = game.constraints;
  const ExtendedProblem problem{game, nd, n};

  // Lipschitz estimate from sampled pairs in A x [0, 10]^n.
  std::mt19937_64 rng(0x0dd5eedULL);
  std::uniform_real_distribution<double> dual_draw(0.0, 10.0);
  double lipschitz = 1e-8;
  for (int s = 0; s < 64; ++s) {
    Vector z1(nd + n), z2(nd + n);
    z1.head(nd) = random_point(game.local_sets, rng);
    z2.head(nd) = random_point(game.local_sets, rng);
    for (int j = 0; j < n; ++j) {
      z1[nd + j] = dual_draw(rng);
      z2[nd + j] = dual_draw(rng);
    }
    const double dist = (z1 - z2).norm();
    if (dist > 0.0) lipschitz = std::max(lipschitz, (problem(z1) - problem(z2)).norm() / dist);
  }
  double step = 1.0 / (2.0 * lipschitz);

  Vector z(nd + n);
  for (int i = 0; i < game.players; ++i) z.segment(static_cast<Eigen::Index>(i) * game.dim, game.dim) =
      game.local_sets[i].anchor();
  z.tail(n).setZero();

  const double target = 0.1 * tol;
  long iter = 0;
  for (; iter < max_iters; ++iter) {
    const Vector fz = problem(z);
    if ((z - problem.project(z - fz)).norm() <= target) break;
    Vector predictor = problem.project(z - step * fz);
    Vector fp = problem(predictor);
    while (step * (fp - fz).norm() > 0.9 * (predictor - z).norm()) {
      step *= 0.5;
      predictor = problem.project(z - step * fz);
      fp = problem(predictor);
    }
    z = problem.project(z - step * fp);
  }
  return certify(game, z.head(nd), z.tail(n), tol, iter, "extragradient");
}

double mapping_asymmetry(const GameSpec& game) {
  if (auto affine = affine_game_mapping(game)) return (affine->jacobian - affine->jacobian.transpose()).cwiseAbs().maxCoeff();
  if (!game.has_gradients()) throw UnsupportedOperation("game '" + game.name + "' has no gradient evaluators");

  const int nd = game.joint_dim();
  std::mt19937_64 rng(0xa55e55ULL);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    Vector x = random_point(game.local_sets, rng);
    Matrix jac(nd, nd);
    for (int k = 0; k < nd; ++k) {
      const double h = 1e-5 * (1.0 + std::abs(x[k]));
      Vector up = x, down = x;
      up[k] += h;
      down[k] -= h;
      jac.col(k) = (game_mapping(game, JointAction(game.players, game.dim, up)) -
                    game_mapping(game, JointAction(game.players, game.dim, down))) /
                   (2.0 * h);
    }
    const double scale = 1.0 + jac.cwiseAbs().maxCoeff();
    worst = std::max(worst, (jac - jac.transpose()).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

EquilibriumCertificate solve_potential(const GameSpec& game, double tol) {
  game.validate();
  if (!game.has_gradients()) throw UnsupportedOperation("game '" + game.name + "' has no gradient evaluators");
  const double asymmetry = mapping_asymmetry(game);
  if (asymmetry > 1e-8) {
    std::ostringstream msg;
    msg << "game mapping Jacobian is not symmetric (max asymmetry " << asymmetry
        << "); no potential function exists, so the potential-game assumption fails";
    throw UnsupportedOperation(msg.str());
  }
  const int nd = game.joint_dim();
  const int n = game.constraints;
  const bool affine_coupling = n == 0 || game.affine.has_value();
  if (!affine_coupling) throw UnsupportedOperation("potential solver needs affine coupling constraints; use solve_vi");
  if (n > 0 && !polyhedral_local_sets(game))
    throw UnsupportedOperation("potential solver with coupling needs polyhedral local sets; use solve_vi");

  Vector start(nd);
  for (int i = 0; i < game.players; ++i) start.segment(static_cast<Eigen::Index>(i) * game.dim, game.dim) =
      game.local_sets[i].anchor();

  const auto [rows, bounds] = polyhedral_local_sets(game) ? polyhedron_rows(game, true)
                                                          : std::pair<Matrix, Vector>{Matrix(0, nd), Vector(0)};
  const auto feasible_start = [&]() -> Vector {
    if (n == 0) return start;
    if (auto slater = slater_point(game.local_sets, game.constraint, game.constraint_jacobian)) return *slater;
    return project(ConvexSet::halfspaces(rows, bounds), start);
  };

  const auto affine = affine_game_mapping(game);
  if (affine && n <= kMaxEnumeratedRows && polyhedral_local_sets(game)) {
    const Matrix hessian = 0.5 * (affine->jacobian + affine->jacobian.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian);
    if (eig.eigenvalues().minCoeff() > 1e-12) {
      if (auto qp = detail::solve_inequality_qp(hessian, affine->offset, rows, bounds, feasible_start())) {
        const Vector lambda = qp->multipliers.tail(n);
        return certify(game, qp->x, lambda, tol, qp->iterations, "active-set");
      }
    }
  }

  // Projected gradient with Armijo backtracking on the potential.
  const auto mapping = [&](const Vector& a) { return game_mapping(game, JointAction(game.players, game.dim, a)); };
  const std::optional<ConvexSet> feasible_set =
      n > 0 ? std::optional<ConvexSet>(ConvexSet::halfspaces(rows, bounds)) : std::nullopt;
  const auto project_feasible = [&](const Vector& a) -> Vector {
    return feasible_set ? project(*feasible_set, a) : project_blocks(game.local_sets, a);
  };
  // f(y) - f(x) as the line integral of M, 5-point Gauss-Legendre.
  static constexpr std::array<double, 5> nodes{0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155,
                                               0.95308992296933200};
  static constexpr std::array<double, 5> weights{0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                                 0.23931433524968324, 0.11846344252809454};
  const auto potential_change = [&](const Vector& x, const Vector& y) {
    const Vector dir = y - x;
    double total = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) total += weights[q] * mapping(x + nodes[q] * dir).dot(dir);
    return total;
  };

  Vector x = feasible_start();
  double step = 1.0;
  long iter = 0;
  const long max_iters = 200000;
  for (; iter < max_iters; ++iter) {
    const Vector grad = mapping(x);
    if ((x - project_feasible(x - grad)).norm() <= 0.1 * tol) break;
    step = std::min(1e6, 2.0 * step);
    Vector next;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      next = project_feasible(x - step * grad);
      if (potential_change(x, next) <= 1e-4 * grad.dot(next - x)) break;
      step *= 0.5;
    }
    if ((next - x).norm() <= 1e-16 * (1.0 + x.norm())) break;
    x = next;
  }
  return certify(game, x, recover_multipliers(game, x), tol, iter, "projected-gradient");
}

DeviationReport deviation_check(const GameSpec& game, const JointAction& candidate, int points) {
  if (points < 2) throw std::invalid_argument("need at least two grid points per coordinate");
  double combos = std::pow(static_cast<double>(points), game.dim);
  if (combos > 1e7) throw std::invalid_argument("deviation grid too large for this dimension");
  const auto count = static_cast<long>(combos);

  DeviationReport report;
  for (int i = 0; i < game.players; ++i) {
    const auto* box = std::get_if<Box>(&game.local_sets[i].shape());
    if (!box) throw UnsupportedOperation("deviation grid needs box local sets");
    const double base = eval_cost(game, i, candidate);
    JointAction trial = candidate;
    std::vector<int> digits(static_cast<std::size_t>(game.dim), 0);
    for (long c = 0; c < count; ++c) {
      long rest = c;
      for (int k = 0; k < game.dim; ++k) {
        digits[k] = static_cast<int>(rest % points);
        rest /= points;
        const double frac = static_cast<double>(digits[k]) / (points - 1);
        trial.block(i)[k] = box->lower[k] + frac * (box->upper[k] - box->lower[k]);
      }
      if (game.constraints > 0 && game.constraint(trial.values()).maxCoeff() > 1e-12) continue;
      ++report.deviations_checked;
      const double gain = base - eval_cost(game, i, trial);
      if (gain > report.best_improvement) {
        report.best_improvement = gain;
        report.player = i;
      }
    }
  }
  return report;
}

}  // namespace gnelearn
