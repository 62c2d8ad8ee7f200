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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "gnelearn/schedule.hpp"

using namespace gnelearn;

namespace {

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST_CASE("power-law values") {
  const Schedule s = Schedule::uniform(2);
  const StepSizes first = step_sizes(s, 0, 0);
  CHECK(first.gamma == 1.0);
  CHECK(first.sigma == 1.0);
  CHECK(first.beta == 1.0);

  const StepSizes later = step_sizes(s, 99, 1);
  CHECK(later.gamma == doctest::Approx(std::pow(100.0, -0.6)));
  CHECK(later.sigma == doctest::Approx(std::pow(100.0, -0.2)));
  CHECK(later.beta == doctest::Approx(0.01));

  const StepSizes dual = step_sizes(s, 99, kDualPlayer);
  CHECK(dual.beta == doctest::Approx(0.01));
  CHECK(std::isnan(dual.gamma));
  CHECK(std::isnan(dual.sigma));
  CHECK(dual_step(s, 99) == dual.beta);
}

TEST_CASE("offsets shift the clock per player") {
  Schedule s = Schedule::uniform(2);
  s.offsets = {1, 5};
  CHECK(step_sizes(s, 4, 1).gamma == doctest::Approx(std::pow(9.0, -0.6)));
  CHECK(step_sizes(s, 0, 1).gamma == doctest::Approx(std::pow(5.0, -0.6)));
  CHECK_THROWS(step_sizes(s, 0, 2));
  CHECK_THROWS(step_sizes(s, -1, 0));
}

TEST_CASE("schedules decrease strictly and players synchronize") {
  Schedule s = Schedule::uniform(3);
  s.offsets = {1, 7, 40};
  s.dual_offset = 3;
  for (int i = 0; i < 3; ++i)
    for (long t = 0; t < 2000; ++t) {
      const StepSizes now = step_sizes(s, t, i), next = step_sizes(s, t + 1, i);
      CHECK(next.gamma < now.gamma);
      CHECK(next.sigma < now.sigma);
      CHECK(next.beta < now.beta);
    }
  for (long t = 0; t < 2000; ++t) CHECK(dual_step(s, t + 1) < dual_step(s, t));
  CHECK(step_sizes(s, 1000000, 2).beta / step_sizes(s, 1000000, 0).beta == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("validator examples") {
  CHECK(validate_schedule(Schedule::uniform(2, 0.6, 0.2), LearnerMode::coupled).empty());
  const auto low_a = validate_schedule(Schedule::uniform(2, 0.45, 0.2), LearnerMode::coupled);
  CHECK(low_a == std::vector<std::string>{"2a>1"});
  const auto low_b = validate_schedule(Schedule::uniform(2, 0.51, 0.10), LearnerMode::coupled);
  CHECK(low_b == std::vector<std::string>{"a+3b>1"});
  CHECK(has(validate_schedule(Schedule::uniform(2, 0.4, 0.0), LearnerMode::coupled), "a+2b>0.5"));
  CHECK(has(validate_schedule(Schedule::uniform(2, 0.8, 0.2), LearnerMode::coupled), "a+2b<=1"));
  CHECK(has(validate_schedule(Schedule::uniform(2, 0.3, 0.1), LearnerMode::uncoupled), "2(a+b)>1"));
  Schedule bad = Schedule::uniform(2);
  bad.offsets = {0, 1};
  bad.dual_offset = 0;
  CHECK(has(validate_schedule(bad, LearnerMode::coupled), "R_i>=1"));
  CHECK(has(validate_schedule(bad, LearnerMode::coupled), "N_0>=1"));
}

TEST_CASE("validator agrees with the inequalities on the exponent grid") {
  for (int i = 1; i <= 20; ++i)
    for (int j = 1; j <= 20; ++j) {
      // Exact rationals in units of 0.05 avoid rounding at the boundaries.
      const int a20 = i, b20 = j;
      const double a = a20 * 0.05, b = b20 * 0.05;
      const bool s1 = a20 + 2 * b20 > 10, s2 = a20 + 2 * b20 <= 20, s3 = 2 * a20 > 20, s4 = a20 + 3 * b20 > 20;
      const bool u3 = 2 * (a20 + b20) > 20;
      const auto coupled = validate_schedule(Schedule::uniform(2, a, b), LearnerMode::coupled);
      const auto uncoupled = validate_schedule(Schedule::uniform(2, a, b), LearnerMode::uncoupled);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(has(coupled, "a+2b>0.5") == !s1);
      CHECK(has(coupled, "a+2b<=1") == !s2);
      CHECK(has(coupled, "2a>1") == !s3);
      CHECK(has(coupled, "a+3b>1") == !s4);
      CHECK(has(uncoupled, "2(a+b)>1") == !u3);
      CHECK(coupled.empty() == (s1 && s2 && s3 && s4));
      if (coupled.empty() && u3) CHECK(uncoupled.empty());
    }
}
