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

#include "gnelearn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gnelearn/errors.hpp"

namespace gnelearn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const ConvexSet& set, const Vector& p) {
  if (p.size() != set.dim()) {
    std::ostringstream msg;
    msg << "point of dimension " << p.size() << " projected onto a set of dimension " << set.dim();
    throw DimensionError(msg.str());
  }
}

ProjectionReport dykstra(const HalfspaceIntersection& h, const Vector& p, const DykstraOptions& opts) {
  const Eigen::Index rows = h.normals.rows();
  Vector norms2(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    norms2[r] = h.normals.row(r).squaredNorm();
    if (norms2[r] == 0.0 && h.offsets[r] < 0.0) throw std::invalid_argument("empty halfspace (0 . x <= negative)");
  }

  auto violation = [&](const Vector& x) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) worst = std::max(worst, h.normals.row(r).dot(x) - h.offsets[r]);
    return worst;
  };

  ProjectionReport report{p, 0, 0.0};
  if (violation(p) <= 0.0) return report;

  Vector x = p;
  Matrix increments = Matrix::Zero(rows, p.size());
  for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const Vector start = x;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (norms2[r] == 0.0) continue;
      Vector y = x + increments.row(r).transpose();
      const double excess = h.normals.row(r).dot(y) - h.offsets[r];
      x = excess > 0.0 ? Vector(y - (excess / norms2[r]) * h.normals.row(r).transpose()) : y;
      increments.row(r) = (y - x).transpose();
    }
    report.sweeps = sweep;
    report.residual = std::max((x - start).norm(), violation(x));
    if (report.residual <= opts.tol) {
      report.point = std::move(x);
      return report;
    }
  }
  std::ostringstream msg;
  msg << "Dykstra projection did not reach residual " << opts.tol << " within " << opts.max_sweeps
      << " sweeps (last " << report.residual << ")";
  throw ConvergenceError(msg.str());
}

}  // namespace

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw DimensionError("box bounds differ in length");
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k])) throw std::invalid_argument("box bounds must be finite");
    if (lower[k] > upper[k]) throw std::invalid_argument("box lower bound exceeds upper bound");
  }
  return ConvexSet(Box{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::box(int dim, double lower, double upper) {
  return box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

ConvexSet ConvexSet::orthant(int dim) {
  if (dim < 0) throw DimensionError("negative orthant dimension");
  return ConvexSet(NonnegativeOrthant{dim});
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be nonnegative");
  return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::halfspaces(Matrix normals, Vector offsets) {
  if (normals.rows() != offsets.size()) throw DimensionError("one offset per halfspace normal required");
  return ConvexSet(HalfspaceIntersection{std::move(normals), std::move(offsets)});
}

int ConvexSet::dim() const {
  return std::visit(Overloaded{
                        [](const Box& b) { return static_cast<int>(b.lower.size()); },
                        [](const NonnegativeOrthant& o) { return o.dim; },
                        [](const Ball& b) { return static_cast<int>(b.center.size()); },
                        [](const HalfspaceIntersection& h) { return static_cast<int>(h.normals.cols()); },
                    },
                    shape_);
}

bool ConvexSet::bounded() const {
  return std::holds_alternative<Box>(shape_) || std::holds_alternative<Ball>(shape_);
}

bool ConvexSet::contains(const Vector& p, double tol) const {
  if (p.size() != dim()) return false;
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return ((p - b.lower).array() >= -tol).all() && ((b.upper - p).array() >= -tol).all();
                        },
                        [&](const NonnegativeOrthant&) { return (p.array() >= -tol).all(); },
                        [&](const Ball& b) { return (p - b.center).norm() <= b.radius + tol; },
                        [&](const HalfspaceIntersection& h) {
                          return ((h.normals * p - h.offsets).array() <= tol).all();
                        },
                    },
                    shape_);
}

Vector ConvexSet::anchor() const {
  return std::visit(Overloaded{
                        [](const Box& b) -> Vector { return 0.5 * (b.lower + b.upper); },
                        [](const NonnegativeOrthant& o) -> Vector { return Vector::Zero(o.dim); },
                        [](const Ball& b) -> Vector { return b.center; },
                        [this](const HalfspaceIntersection& h) -> Vector {
                          return project(*this, Vector::Zero(h.normals.cols()));
                        },
                    },
                    shape_);
}

ProjectionReport project_with_report(const ConvexSet& set, const Vector& p, const DykstraOptions& opts) {
  require_dim(set, p);
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return ProjectionReport{p.cwiseMax(b.lower).cwiseMin(b.upper), 0, 0.0};
                        },
                        [&](const NonnegativeOrthant&) { return ProjectionReport{p.cwiseMax(0.0), 0, 0.0}; },
                        [&](const Ball& b) {
                          const Vector offset = p - b.center;
                          const double dist = offset.norm();
                          // A few ulps of slack keep projected points fixed under reprojection.
                          if (dist <= b.radius * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
                            return ProjectionReport{p, 0, 0.0};
                          return ProjectionReport{Vector(b.center + (b.radius / dist) * offset), 0, 0.0};
                        },
                        [&](const HalfspaceIntersection& h) { return dykstra(h, p, opts); },
                    },
                    set.shape());
}

Vector project(const ConvexSet& set, const Vector& p, const DykstraOptions& opts) {
  return project_with_report(set, p, opts).point;
}

Vector project_blocks(std::span<const ConvexSet> sets, const Vector& p) {
  Vector out(p.size());
  Eigen::Index offset = 0;
  for (const ConvexSet& s : sets) {
    const int d = s.dim();
    if (offset + d > p.size()) throw DimensionError("stacked vector shorter than the product of sets");
    out.segment(offset, d) = project(s, p.segment(offset, d));
    offset += d;
  }
  if (offset != p.size()) throw DimensionError("stacked vector longer than the product of sets");
  return out;
}

std::optional<Vector> slater_point(std::span<const ConvexSet> sets, const ConstraintFn& g,
                                   const JacobianFn& jacobian, const SlaterOptions& opts) {
  Eigen::Index total = 0;
  double scale = 1.0;
  for (const ConvexSet& s : sets) {
    total += s.dim();
    if (const auto* b = std::get_if<Box>(&s.shape()); b && b->lower.size() > 0)
      scale = std::max(scale, (b->upper - b->lower).maxCoeff());
    if (const auto* b = std::get_if<Ball>(&s.shape())) scale = std::max(scale, 2.0 * b->radius);
  }

  Vector anchor(total);
  {
    Eigen::Index offset = 0;
    for (const ConvexSet& s : sets) {
      anchor.segment(offset, s.dim()) = s.anchor();
      offset += s.dim();
    }
  }
  if (!g) return anchor;
  if (g(anchor).size() == 0) return anchor;

  auto worst_row = [&](const Vector& x, double& value) {
    const Vector gx = g(x);
    Eigen::Index row = 0;
    value = gx.maxCoeff(&row);
    return row;
  };

  auto row_gradient = [&](const Vector& x, Eigen::Index row) -> Vector {
    if (jacobian) return jacobian(x).row(row).transpose();
    Vector grad(x.size());
    Vector probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double h = 1e-6 * (1.0 + std::abs(x[k]));
      probe[k] = x[k] + h;
      const double up = g(probe)[row];
      probe[k] = x[k] - h;
      const double down = g(probe)[row];
      probe[k] = x[k];
      grad[k] = (up - down) / (2.0 * h);
    }
    return grad;
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Vector best = anchor;
  double best_value = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Vector x(total);
    Eigen::Index offset = 0;
    for (const ConvexSet& s : sets) {
      Vector start = s.anchor();
      if (restart > 0) {
        if (const auto* b = std::get_if<Box>(&s.shape())) {
          for (Eigen::Index k = 0; k < start.size(); ++k)
            start[k] = b->lower[k] + unit(rng) * (b->upper[k] - b->lower[k]);
        } else {
          for (Eigen::Index k = 0; k < start.size(); ++k) start[k] += scale * normal(rng);
          start = project(s, start);
        }
      }
      x.segment(offset, s.dim()) = start;
      offset += s.dim();
    }

    for (int k = 0; k < opts.iterations; ++k) {
      double value = 0.0;
      const Eigen::Index row = worst_row(x, value);
      if (value < best_value) {
        best_value = value;
        best = x;
      }
      const Vector grad = row_gradient(x, row);
      const double norm = grad.norm();
      if (norm == 0.0) break;
      x = project_blocks(sets, x - (scale / std::sqrt(k + 1.0)) * grad / norm);
    }
    double value = 0.0;
    worst_row(x, value);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  if (best_value < -opts.margin) return best;
  return std::nullopt;
}

}  // namespace gnelearn
