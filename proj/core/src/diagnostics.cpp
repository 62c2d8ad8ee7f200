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

#include "gnelearn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gnelearn/errors.hpp"
#include "gnelearn/random.hpp"

namespace gnelearn {

namespace {

// Running mean and variance per coordinate (Welford).
class Moments {
 public:
  explicit Moments(Eigen::Index size) : mean_(Vector::Zero(size)), m2_(Vector::Zero(size)) {}

  void add(const Vector& x) {
    ++count_;
    const Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(x - mean_);
  }

  const Vector& mean() const { return mean_; }
  Vector stderr_() const {
    if (count_ < 2) return Vector::Zero(mean_.size());
    const double n = static_cast<double>(count_);
    return (m2_ / (n - 1.0) / n).cwiseMax(0.0).cwiseSqrt();
  }

 private:
  long count_ = 0;
  Vector mean_;
  Vector m2_;
};

void check_query(const MixedQuery& q, const GameSpec& game, bool allow_dual_player) {
  const int upper = allow_dual_player ? game.players + 1 : game.players;
  if (q.player < 0 || q.player >= upper) throw std::out_of_range("mixed query player index");
  if (q.means.size() != game.joint_dim()) throw DimensionError("mixed query means length");
  if (q.sigma.size() != game.players) throw DimensionError("mixed query needs one sigma per player");
  if ((q.sigma.array() <= 0.0).any()) throw std::invalid_argument("mixed query sigma must be positive");
  if (q.dual.size() != game.constraints) throw DimensionError("mixed query dual length");
  if (q.samples < 1) throw std::invalid_argument("mixed query needs at least one sample");
}

class GaussianSampler {
 public:
  GaussianSampler(const MixedQuery& q, int dim) : q_(q), dim_(dim), rng_(make_rng(q.seed)) {}

  const Vector& next() {
    x_.resize(q_.means.size());
    for (Eigen::Index k = 0; k < x_.size(); ++k) x_[k] = q_.means[k] + q_.sigma[k / dim_] * normal_(rng_);
    return x_;
  }

 private:
  const MixedQuery& q_;
  int dim_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Vector x_;
};

double associated_value(const GameSpec& game, int player, const Vector& x, const Vector& dual) {
  const double price = game.constraints > 0 ? dual.dot(game.constraint(x)) : 0.0;
  return player == game.players ? -price : game.costs[player](x) + price;
}

bool has_closed_form(const GameSpec& game) { return game.quadratic && (game.constraints == 0 || game.affine); }

}  // namespace

Estimate mixed_cost(const MixedQuery& q, const GameSpec& game) {
  check_query(q, game, true);
  GaussianSampler sampler(q, game.dim);
  Moments moments(1);
  Vector value(1);
  for (long s = 0; s < q.samples; ++s) {
    value[0] = associated_value(game, q.player, sampler.next(), q.dual);
    moments.add(value);
  }
  Estimate est{moments.mean()[0], moments.stderr_()[0], std::nullopt};

  if (has_closed_form(game)) {
    const double price = game.constraints > 0 ? q.dual.dot(game.constraint(q.means)) : 0.0;
    if (q.player == game.players) {
      est.closed_form = -price;
    } else {
      const QuadraticCost& cost = (*game.quadratic)[q.player];
      double spread = 0.0;
      for (Eigen::Index k = 0; k < q.means.size(); ++k) {
        const double s = q.sigma[k / game.dim];
        spread += 0.5 * cost.hessian(k, k) * s * s;
      }
      est.closed_form = cost.value(q.means) + spread + price;
    }
  }
  return est;
}

ScoreGradientReport score_gradient_check(const MixedQuery& q, const GameSpec& game) {
  check_query(q, game, false);
  const int i = q.player;
  const Eigen::Index off = static_cast<Eigen::Index>(i) * game.dim;
  const double var = q.sigma[i] * q.sigma[i];
  const bool dual_side = game.constraints > 0 && game.affine.has_value();

  GaussianSampler sampler(q, game.dim);
  Moments score(game.dim);
  Moments constraint(game.constraints);
  Vector sample_score(game.dim);
  for (long s = 0; s < q.samples; ++s) {
    const Vector& x = sampler.next();
    const Vector g = game.constraints > 0 ? game.constraint(x) : Vector(0);
    const double payoff = game.costs[i](x) + (game.constraints > 0 ? q.dual.dot(g) : 0.0);
    sample_score = payoff * (x.segment(off, game.dim) - q.means.segment(off, game.dim)) / var;
    score.add(sample_score);
    if (dual_side) constraint.add(g);
  }

  ScoreGradientReport report;
  report.estimate = score.mean();
  report.stderr_ = score.stderr_();
  if (has_closed_form(game)) {
    // Quadratic costs: the mixed gradient equals the extended mapping at the mean.
    const Vector ext = extended_mapping(game, JointAction(game.players, game.dim, q.means), DualVector(q.dual));
    report.target = ext.segment(off, game.dim);
    report.target_kind = "closed-form";
  } else {
    // Common random numbers make the difference quotient a pathwise derivative.
    report.target.resize(game.dim);
    MixedQuery shifted = q;
    for (int k = 0; k < game.dim; ++k) {
      const double h = 1e-4 * (1.0 + std::abs(q.means[off + k]));
      shifted.means = q.means;
      shifted.means[off + k] += h;
      const double up = mixed_cost(shifted, game).mean;
      shifted.means[off + k] -= 2.0 * h;
      const double down = mixed_cost(shifted, game).mean;
      report.target[k] = (up - down) / (2.0 * h);
    }
    report.target_kind = "finite-difference";
  }
  report.pass = ((report.estimate - report.target).cwiseAbs().array() <= 3.0 * report.stderr_.array()).all();

  if (dual_side) {
    report.constraint_mean = constraint.mean();
    report.constraint_stderr = constraint.stderr_();
    report.constraint_target = game.constraint(q.means);
    report.dual_pass = ((*report.constraint_mean - *report.constraint_target).cwiseAbs().array() <=
                        3.0 * report.constraint_stderr->array())
                           .all();
  }
  return report;
}

BiasReport bias_term(const MixedQuery& q, const GameSpec& game) {
  check_query(q, game, false);
  const Eigen::Index off = static_cast<Eigen::Index>(q.player) * game.dim;
  const DualVector dual(q.dual);
  const Vector at_mean =
      extended_mapping(game, JointAction(game.players, game.dim, q.means), dual).segment(off, game.dim);

  GaussianSampler sampler(q, game.dim);
  Moments diff(game.dim);
  for (long s = 0; s < q.samples; ++s) {
    const Vector& x = sampler.next();
    diff.add(extended_mapping(game, JointAction(game.players, game.dim, x), dual).segment(off, game.dim) - at_mean);
  }
  BiasReport report;
  report.estimate = diff.mean();
  report.stderr_ = diff.stderr_();
  report.norm = report.estimate.norm();
  report.within_noise = (report.estimate.cwiseAbs().array() <= 3.0 * report.stderr_.array()).all();
  return report;
}

const char* to_string(MonotonicityClass c) {
  switch (c) {
    case MonotonicityClass::strong: return "strong";
    case MonotonicityClass::strict: return "strict";
    case MonotonicityClass::monotone: return "monotone";
    case MonotonicityClass::pseudo_undetermined: return "pseudo-undetermined";
    case MonotonicityClass::violated: return "violated";
  }
  return "unknown";
}

MonotonicityReport monotonicity_classify(const VectorMap& mapping, std::span<const ConvexSet> domain, long samples,
                                         std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto draw = [&]() {
    Eigen::Index total = 0;
    for (const auto& s : domain) total += s.dim();
    Vector out(total);
    Eigen::Index off = 0;
    for (const auto& s : domain) {
      Vector block = s.anchor();
      if (const auto* b = std::get_if<Box>(&s.shape())) {
        for (Eigen::Index k = 0; k < block.size(); ++k) block[k] = b->lower[k] + unit(rng) * (b->upper[k] - b->lower[k]);
      } else {
        for (Eigen::Index k = 0; k < block.size(); ++k) block[k] += normal(rng);
        block = project(s, block);
      }
      out.segment(off, s.dim()) = block;
      off += s.dim();
    }
    return out;
  };

  MonotonicityReport report;

  // Affinity: M(t x + (1-t) y) == t M(x) + (1-t) M(y) on random triples.
  bool affine = true;
  for (int trial = 0; trial < 20 && affine; ++trial) {
    const Vector x = draw(), y = draw();
    const double t = unit(rng);
    const Vector lhs = mapping(t * x + (1.0 - t) * y);
    const Vector rhs = t * mapping(x) + (1.0 - t) * mapping(y);
    const double scale = 1.0 + std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff());
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) affine = false;
  }
  report.affine = affine;

  bool monotone_fails = false;
  if (affine) {
    const Vector base = draw();
    const Vector at_base = mapping(base);
    const Eigen::Index m = base.size();
    Matrix jac(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      Vector probe = base;
      probe[k] += 1.0;
      jac.col(k) = mapping(probe) - at_base;
    }
    const Matrix sym = 0.5 * (jac + jac.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double tol = 1e-9 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    report.kappa = std::abs(lo) <= tol ? 0.0 : lo;
    if (lo > tol) {
      report.verdict = MonotonicityClass::strong;
      return report;
    }
    if (lo >= -tol) {
      report.verdict = MonotonicityClass::monotone;
      return report;
    }
    monotone_fails = true;
  }

  // Sampled pairs.
  double worst_ratio = std::numeric_limits<double>::infinity();
  bool counterexample = false;
  for (long s = 0; s < samples; ++s) {
    const Vector x = draw(), y = draw();
    const Vector diff = x - y;
    const double dist2 = diff.squaredNorm();
    if (dist2 == 0.0) continue;
    ++report.pairs_checked;
    const Vector mx = mapping(x), my = mapping(y);
    const double inner = (mx - my).dot(diff);
    worst_ratio = std::min(worst_ratio, inner / dist2);
    if (inner < 0.0) monotone_fails = true;
    // Pseudo-monotone: (M(y), x - y) >= 0 must imply (M(x), x - y) >= 0.
    if (my.dot(diff) >= 0.0 && mx.dot(diff) < 0.0) counterexample = true;
    if (mx.dot(-diff) >= 0.0 && my.dot(-diff) < 0.0) counterexample = true;
  }
  if (!affine) report.kappa = worst_ratio;

  if (counterexample) {
    report.verdict = MonotonicityClass::violated;
  } else if (monotone_fails) {
    report.verdict = MonotonicityClass::pseudo_undetermined;
  } else if (worst_ratio > 0.0) {
    report.verdict = MonotonicityClass::strict;
  } else {
    report.verdict = MonotonicityClass::monotone;
  }
  return report;
}

std::vector<double> squared_error_curve(const RunRecord& record, const Vector& equilibrium) {
  if (equilibrium.size() != record.joint_dim()) throw DimensionError("equilibrium length differs from record");
  std::vector<double> out(static_cast<std::size_t>(record.rows()));
  for (long r = 0; r < record.rows(); ++r) out[static_cast<std::size_t>(r)] = (record.mean_row(r) - equilibrium).squaredNorm();
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs matching series of length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::domain_error("log-log fit needs positive values");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateFit rate_fit_curves(std::span<const std::vector<double>> squared_errors, const Schedule& schedule,
                        const RateFitOptions& options) {
  if (squared_errors.size() < options.min_runs) throw std::invalid_argument("rate fit needs more runs");
  const std::size_t rows = squared_errors.front().size();
  for (const auto& curve : squared_errors)
    if (curve.size() != rows) throw DimensionError("ensemble curves differ in length");
  const long horizon = static_cast<long>(rows);
  if (horizon <= options.burn_in) throw std::invalid_argument("run shorter than the burn-in window");

  RateFit fit;
  fit.a = schedule.a;
  fit.b = schedule.b;
  fit.theoretical_slope = -(2.0 * (schedule.a + schedule.b) - 1.0);
  fit.tolerance = options.tolerance;

  const double decades = std::log10(static_cast<double>(horizon) / options.burn_in);
  const int points = std::max(2, static_cast<int>(std::ceil(decades * options.points_per_decade)) + 1);
  for (int k = 0; k < points; ++k) {
    const long t = std::lround(options.burn_in * std::pow(10.0, decades * k / (points - 1)));
    if (fit.times.empty() || t > fit.times.back()) fit.times.push_back(std::min(t, horizon));
  }

  std::vector<double> xs;
  for (long t : fit.times) {
    double total = 0.0;
    for (const auto& curve : squared_errors) total += curve[static_cast<std::size_t>(t - 1)];
    fit.mean_squared_error.push_back(total / static_cast<double>(squared_errors.size()));
    xs.push_back(static_cast<double>(t));
  }
  fit.slope = loglog_slope(xs, fit.mean_squared_error);
  double mean_lx = 0, mean_ly = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mean_lx += std::log(xs[k]);
    mean_ly += std::log(fit.mean_squared_error[k]);
  }
  fit.intercept = (mean_ly - fit.slope * mean_lx) / static_cast<double>(xs.size());
  fit.pass = fit.slope <= fit.theoretical_slope + fit.tolerance;
  return fit;
}

RateFit rate_fit(std::span<const RunRecord> ensemble, const Vector& equilibrium, const Schedule& schedule,
                 const RateFitOptions& options) {
  if (ensemble.size() < options.min_runs) throw std::invalid_argument("rate fit needs more runs");
  std::vector<std::vector<double>> curves;
  curves.reserve(ensemble.size());
  for (const auto& rec : ensemble) curves.push_back(squared_error_curve(rec, equilibrium));
  return rate_fit_curves(curves, schedule, options);
}

RecursionReport recursion_bound_check(const RecursionParams& p, long horizon) {
  if (!(p.a0 >= 0.0)) throw std::invalid_argument("recursion needs a0 >= 0");
  if (!(p.kappa > 1.0)) throw std::invalid_argument("recursion needs kappa > 1");
  if (!(p.psi > 0.0)) throw std::invalid_argument("recursion needs psi > 0");
  if (!(p.c > 1.0 && p.c <= 2.0)) throw std::invalid_argument("recursion needs c in (1, 2]");
  if (horizon < 2) throw std::invalid_argument("recursion horizon must be at least 2");

  RecursionReport report;
  report.constant = std::max(p.a0, p.psi / (p.kappa - 1.0));
  report.holds = true;
  report.holds_beyond_kappa = true;
  double a = p.a0;
  for (long t = 1; t <= horizon; ++t) {
    const double td = static_cast<double>(t);
    const double bound = report.constant / std::pow(td, p.c - 1.0);
    if (report.constant > 0.0) report.worst_ratio = std::max(report.worst_ratio, a / bound);
    if (a > bound * (1.0 + 1e-12)) {
      report.holds = false;
      if (report.first_violation < 0) report.first_violation = t;
      report.last_violation = t;
      if (td > p.kappa) report.holds_beyond_kappa = false;
    }
    a = std::max(0.0, 1.0 - p.kappa / td) * a + p.psi / std::pow(td, p.c);
  }
  return report;
}

double relative_error(const Vector& mu, const Vector& equilibrium) {
  if (mu.size() != equilibrium.size()) throw DimensionError("relative error operands differ in length");
  const double norm = equilibrium.norm();
  if (norm == 0.0) throw std::domain_error("relative error undefined for a zero equilibrium; use the absolute error");
  return (mu - equilibrium).norm() / norm;
}

}  // namespace gnelearn
