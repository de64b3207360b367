// Copyright (c) the erwsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "erw/env.hpp"

using namespace erw;

namespace {
// Oracle for the drift sum: direct evaluation of sum(2 p_k - 1).
double drift_sum(const std::vector<double>& probs) {
  double s = 0.0;
  for (double p : probs) s += 2.0 * p - 1.0;
  return s;
}
}  // namespace

TEST_CASE("cookie lookup is total and follows the form") {
  const auto fin = CookieEnvironment::finite({0.9, 0.9, 0.9});
  CHECK(fin.cookie_prob(5) == 0.5);   // tail rule
  CHECK(fin.cookie_prob(2) == 0.9);   // direct index
  const auto per = CookieEnvironment::periodic({0.6, 0.4});
  CHECK(per.cookie_prob(3) == 0.6);   // period-2 wraparound
  CHECK(per.cookie_prob(4) == 0.4);
  CHECK(per.cookie_prob(1001) == 0.6);
}

TEST_CASE("constructor enforces ellipticity") {
  CHECK_THROWS_AS(CookieEnvironment::finite({0.9, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CookieEnvironment::finite({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(CookieEnvironment::periodic({0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CookieEnvironment::finite({}), std::invalid_argument);
  CHECK_NOTHROW(CookieEnvironment::finite({1e-9, 1.0 - 1e-9}));
}

TEST_CASE("delta equals the drift sum") {
  const std::vector<std::vector<double>> cases = {
      {0.9, 0.9, 0.9}, {0.5, 0.5}, {0.9, 0.9}, {0.2, 0.7, 0.55, 0.5}};
  for (const auto& probs : cases) {
    const auto env = CookieEnvironment::finite(probs);
    CHECK(delta(env) == doctest::Approx(drift_sum(probs)).epsilon(1e-15));
  }
  CHECK(delta(CookieEnvironment::finite({0.9, 0.9, 0.9})) ==
        doctest::Approx(2.4).epsilon(1e-13));
  CHECK(delta(CookieEnvironment::finite({0.5, 0.5})) == doctest::Approx(0.0));
  CHECK(delta(CookieEnvironment::finite({0.9, 0.9})) ==
        doctest::Approx(1.6).epsilon(1e-13));
  CHECK_THROWS_AS(delta(CookieEnvironment::periodic({0.6, 0.6})),
                  std::domain_error);
}

TEST_CASE("theta matches hand-evaluated values") {
  // (0.6, 0.4): numerator 0.08, denominator 1.92
  CHECK(std::abs(theta(CookieEnvironment::periodic({0.6, 0.4})) - 1.0 / 24.0) < 1e-12);
  // every 2p-1 vanishes
  CHECK(theta(CookieEnvironment::periodic({0.5, 0.5})) == doctest::Approx(0.0));
  // (0.4, 0.6): numerator -0.12, denominator 1.92
  CHECK(std::abs(theta(CookieEnvironment::periodic({0.4, 0.6})) - (-0.0625)) < 1e-12);
  CHECK_THROWS_AS(theta(CookieEnvironment::finite({0.6})), std::domain_error);
}

TEST_CASE("classification follows the drift criteria") {
  const auto d1 = classify(CookieEnvironment::finite({0.9, 0.9, 0.9}));
  CHECK(d1.classification == Classification::kTransientPositiveSpeed);
  CHECK(*d1.delta == doctest::Approx(2.4));

  const auto d2 = classify(CookieEnvironment::finite({0.9, 0.9}));
  CHECK(d2.classification == Classification::kTransientZeroSpeed);

  const auto d3 = classify(CookieEnvironment::finite({0.55}));
  CHECK(d3.classification == Classification::kRecurrentOrLeft);

  // boundaries flagged
  CHECK(classify(CookieEnvironment::finite({0.5, 0.5, 0.5})).boundary);
  CHECK(classify(CookieEnvironment::finite({0.75, 0.75})).boundary);  // delta = 1
  CHECK_FALSE(classify(CookieEnvironment::finite({0.9, 0.9, 0.9})).boundary);
}

TEST_CASE("periodic classification") {
  const auto d1 = classify(CookieEnvironment::periodic({0.6, 0.4}));
  CHECK(d1.classification == Classification::kRecurrentOrLeft);
  CHECK(d1.sufficient_only);
  CHECK(*d1.pbar == doctest::Approx(0.5));
  CHECK(std::abs(*d1.theta - 1.0 / 24.0) < 1e-12);

  const auto d2 = classify(CookieEnvironment::periodic({0.8, 0.4}));
  CHECK(d2.classification == Classification::kTransientPositiveSpeed);
  CHECK(*d2.pbar == doctest::Approx(0.6));

  const auto d3 = classify(CookieEnvironment::periodic({0.4, 0.6}));
  CHECK(d3.classification == Classification::kRecurrentOrLeft);

  // pbar = 1/2 with a large theta: transient right, speed unknown.
  // theta(0.95, 0.05) = [0.05*0.9 + 0.95*(0.9-0.9)] / [4*(2*0.95*0.05)]
  //                   = 0.045 / 0.38 < 1 -> still RecurrentOrLeft;
  // build one that clears 1: long block heavy at the start.
  const auto d4 = classify(CookieEnvironment::periodic(
      {0.99, 0.99, 0.99, 0.99, 0.01, 0.01, 0.01, 0.01}));
  CHECK(*d4.pbar == doctest::Approx(0.5));
  if (*d4.theta > 1.0) {
    CHECK(d4.classification == Classification::kTransientRightUnknownSpeed);
    CHECK_FALSE(d4.sufficient_only);
  } else {
    CHECK(d4.classification == Classification::kRecurrentOrLeft);
  }
}

TEST_CASE("classify is a pure function") {
  const auto env = CookieEnvironment::periodic({0.6, 0.4});
  const auto a = classify(env);
  const auto b = classify(env);
  CHECK(a.classification == b.classification);
  CHECK(*a.theta == *b.theta);
  CHECK(*a.pbar == *b.pbar);
}
