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


#include <random>

#include <benchmark/benchmark.h>

#include "gnelearn/cournot.hpp"
#include "gnelearn/diagnostics.hpp"
#include "gnelearn/geometry.hpp"
#include "gnelearn/learner.hpp"
#include "gnelearn/oracle.hpp"

using namespace gnelearn;

namespace {

Vector random_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 5.0);
  Vector v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

void BM_ProjectBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexSet box = ConvexSet::box(n, 0.0, 9.0);
  std::mt19937_64 rng(1);
  const Vector p = random_point(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(project(box, p));
}
BENCHMARK(BM_ProjectBox)->Arg(4)->Arg(64);

void BM_ProjectBall(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexSet ball = ConvexSet::ball(Vector::Zero(n), 1.0);
  std::mt19937_64 rng(2);
  const Vector p = random_point(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(project(ball, p));
}
BENCHMARK(BM_ProjectBall)->Arg(4)->Arg(64);

// Dykstra on a simplex-like polytope.
void BM_ProjectHalfspaces(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Matrix normals(n + 1, n);
  normals << -Matrix::Identity(n, n), Matrix::Ones(1, n);
  Vector offsets = Vector::Zero(n + 1);
  offsets[n] = 1.0;
  const ConvexSet poly = ConvexSet::halfspaces(normals, offsets);
  std::mt19937_64 rng(3);
  const Vector p = random_point(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(project(poly, p));
}
BENCHMARK(BM_ProjectHalfspaces)->Arg(4)->Arg(16);

void BM_LearnerStep(benchmark::State& state) {
  const auto cg = build_cournot(static_cast<int>(state.range(0)), 4, 1);
  const Schedule schedule = Schedule::uniform(cg.game.players, 0.6, 0.2);
  LearnerState s = initial_state(cg.game, LearnerMode::coupled, 7);
  for (auto _ : state) benchmark::DoNotOptimize(step(cg.game, schedule, LearnerMode::coupled, s));
}
BENCHMARK(BM_LearnerStep)->Arg(3)->Arg(10);

void BM_SolveVi(benchmark::State& state) {
  const auto cg = build_cournot(static_cast<int>(state.range(0)), 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_vi(cg.game, 1e-8));
}
BENCHMARK(BM_SolveVi)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SolvePotentialMicro(benchmark::State& state) {
  const GameSpec g = micro_game();
  for (auto _ : state) benchmark::DoNotOptimize(solve_potential(g, 1e-10));
}
BENCHMARK(BM_SolvePotentialMicro);

void BM_MixedCostMonteCarlo(benchmark::State& state) {
  const auto cg = build_cournot(3, 4, 1);
  GameSpec g = cg.game;
  g.quadratic.reset();  // force sampling
  MixedQuery q;
  q.means = Vector::Constant(12, 1.0);
  q.sigma = Vector::Constant(3, 0.5);
  q.dual = Vector::Constant(4, 0.5);
  q.samples = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(mixed_cost(q, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MixedCostMonteCarlo)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
