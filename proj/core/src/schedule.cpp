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

#include "gnelearn/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gnelearn {

namespace {
// Exponents are typed in decimal, so 0.4 + 3 * 0.2 must still count as 1.
constexpr double kSlack = 1e-12;

bool greater(double lhs, double rhs) { return lhs > rhs + kSlack; }
bool at_most(double lhs, double rhs) { return lhs <= rhs + kSlack; }
}  // namespace

Schedule Schedule::uniform(int players, double a, double b, int offset, int dual_offset) {
  Schedule s;
  s.a = a;
  s.b = b;
  s.offsets.assign(static_cast<std::size_t>(players), offset);
  s.dual_offset = dual_offset;
  return s;
}

StepSizes step_sizes(const Schedule& s, long t, int player) {
  if (t < 0) throw std::invalid_argument("iteration index must be nonnegative");
  if (player == kDualPlayer) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, dual_step(s, t)};
  }
  if (player < 0 || player >= static_cast<int>(s.offsets.size())) throw std::out_of_range("schedule player index");
  const double base = static_cast<double>(t) + s.offsets[static_cast<std::size_t>(player)];
  const double gamma = std::pow(base, -s.a);
  const double sigma = std::pow(base, -s.b);
  return {gamma, sigma, gamma * sigma * sigma};
}

double dual_step(const Schedule& s, long t) {
  if (t < 0) throw std::invalid_argument("iteration index must be nonnegative");
  return std::pow(static_cast<double>(t) + s.dual_offset, -(s.a + 2.0 * s.b));
}

std::vector<std::string> validate_schedule(const Schedule& s, LearnerMode mode) {
  std::vector<std::string> violations;
  const double a2b = s.a + 2.0 * s.b;
  if (!greater(a2b, 0.5)) violations.emplace_back("a+2b>0.5");
  if (!at_most(a2b, 1.0)) violations.emplace_back("a+2b<=1");
  if (mode == LearnerMode::coupled) {
    if (!greater(2.0 * s.a, 1.0)) violations.emplace_back("2a>1");
  } else {
    if (!greater(2.0 * (s.a + s.b), 1.0)) violations.emplace_back("2(a+b)>1");
  }
  if (!greater(s.a + 3.0 * s.b, 1.0)) violations.emplace_back("a+3b>1");
  for (int r : s.offsets)
    if (r < 1) {
      violations.emplace_back("R_i>=1");
      break;
    }
  if (s.dual_offset < 1) violations.emplace_back("N_0>=1");
  return violations;
}

const char* to_string(LearnerMode mode) { return mode == LearnerMode::coupled ? "coupled" : "uncoupled"; }

}  // namespace gnelearn
