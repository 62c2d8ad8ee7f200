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

#include "gnelearn/cournot.hpp"

#include <random>
#include <stdexcept>

#include "gnelearn/errors.hpp"
#include "gnelearn/random.hpp"

namespace gnelearn {

GameSpec cournot_game(const CournotParams& p) {
  const int n = p.players, d = p.horizon;
  if (n < 2 || d < 1) throw std::invalid_argument("cournot needs N >= 2 and d >= 1");
  if (static_cast<int>(p.production.size()) != n) throw DimensionError("one production matrix per player");
  if (p.price.rows() != d || p.price.cols() != d || p.offset.size() != d || p.capacities.size() != d)
    throw DimensionError("cournot parameter shapes differ from the horizon");

  const Eigen::Index nd = static_cast<Eigen::Index>(n) * d;
  const double share = 2.0 / n;
  std::vector<QuadraticCost> costs;
  for (int i = 0; i < n; ++i) {
    const Matrix& q = p.production[static_cast<std::size_t>(i)];
    if (q.rows() != d || q.cols() != d) throw DimensionError("production matrix shape");
    QuadraticCost cost{Matrix::Zero(nd, nd), Vector::Zero(nd), 0.0};
    const Eigen::Index oi = static_cast<Eigen::Index>(i) * d;
    cost.hessian.block(oi, oi, d, d) = q + q.transpose() + share * (p.price + p.price.transpose());
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Eigen::Index oj = static_cast<Eigen::Index>(j) * d;
      cost.hessian.block(oi, oj, d, d) = share * p.price;
      cost.hessian.block(oj, oi, d, d) = share * p.price.transpose();
    }
    cost.linear.segment(oi, d) = 2.0 * p.offset;
    costs.push_back(std::move(cost));
  }

  AffineConstraint coupling{Matrix::Zero(d, nd), p.capacities};
  for (int i = 0; i < n; ++i) coupling.matrix.middleCols(static_cast<Eigen::Index>(i) * d, d) = Matrix::Identity(d, d);

  std::vector<ConvexSet> sets(static_cast<std::size_t>(n), ConvexSet::box(d, 0.0, p.player_cap));
  return make_quadratic_game("cournot", n, d, std::move(costs), std::move(coupling), std::move(sets));
}

CournotGame build_cournot(int players, int horizon, std::uint64_t master_seed, const CournotOverrides& overrides) {
  if (players < 2 || horizon < 1) throw std::invalid_argument("cournot needs N >= 2 and d >= 1");
  CournotParams p;
  p.players = players;
  p.horizon = horizon;
  p.master_seed = master_seed;
  p.production.assign(static_cast<std::size_t>(players), Matrix::Identity(horizon, horizon));
  p.price = Matrix::Identity(horizon, horizon);

  Rng offset_rng = make_rng(derive_seed(master_seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  p.offset.resize(horizon);
  for (auto& v : p.offset) v = normal(offset_rng);

  Rng cap_rng = make_rng(derive_seed(master_seed, 1));
  std::uniform_real_distribution<double> uniform(3.0 * players, 3.0 * players + 100.0);
  p.capacities.resize(horizon);
  for (auto& v : p.capacities) v = uniform(cap_rng);

  if (overrides.offset) p.offset = *overrides.offset;
  if (overrides.capacities) p.capacities = *overrides.capacities;
  if (overrides.player_cap) p.player_cap = *overrides.player_cap;
  return {cournot_game(p), std::move(p)};
}

GameSpec micro_game(double c, double capacity, bool coupled) {
  Matrix h1(2, 2), h2(2, 2);
  h1 << 3, 1, 1, 1;
  h2 << 1, 1, 1, 3;
  std::vector<QuadraticCost> costs{{h1, Vector::Unit(2, 0) * 2.0 * c, 0.0}, {h2, Vector::Unit(2, 1) * 2.0 * c, 0.0}};
  std::optional<AffineConstraint> coupling;
  if (coupled) coupling = AffineConstraint{Matrix::Ones(1, 2), Vector::Constant(1, capacity)};
  std::vector<ConvexSet> sets(2, ConvexSet::box(1, 0.0, 9.0));
  return make_quadratic_game("builtin-micro", 2, 1, std::move(costs), std::move(coupling), std::move(sets));
}

}  // namespace gnelearn
