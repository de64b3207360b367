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

#include "erw/oracle.hpp"
#include "erw/stats.hpp"
#include "erw/walk.hpp"

using namespace erw;

namespace {
const CookieEnvironment kFair = CookieEnvironment::finite({0.5});
const CookieEnvironment kSingle09 = CookieEnvironment::finite({0.9});
}  // namespace

TEST_CASE("exact path law basics") {
  const auto fair2 = exact_path_distribution(kFair, 2);
  CHECK(std::abs(total_mass(fair2) - 1.0) < 1e-12);
  CHECK(std::abs(terminal_value_probability(fair2, 2) - 0.25) < 1e-12);

  const auto one = exact_path_distribution(kSingle09, 1);
  CHECK(std::abs(terminal_value_probability(one, 1) - 0.9) < 1e-12);

  const auto three = exact_path_distribution(kSingle09, 3);
  CHECK(std::abs(hit_level_by_time_probability(three, 1, 3) - 0.945) < 1e-12);
  CHECK(std::abs(total_mass(three) - 1.0) < 1e-12);

  CHECK_THROWS_AS(exact_path_distribution(kFair, 25), std::invalid_argument);
}

TEST_CASE("path probabilities follow the departure-count cookie rule") {
  // env (0.9, tail 1/2); path 0,1,0,1: steps +,-,+
  // departures: site0 #1 (0.9), site1 #1 (1-0.9), site0 #2 (0.5)... mask 0b101
  const auto dist = exact_path_distribution(kSingle09, 3);
  CHECK(std::abs(dist.prob[0b101] - 0.9 * 0.1 * 0.5) < 1e-15);
  // path 0,-1,-2,-3: every site fresh, each step uses cookie 1
  CHECK(std::abs(dist.prob[0b000] - 0.1 * 0.1 * 0.1) < 1e-15);
}

TEST_CASE("exact coupled law of the identity kernel is diagonal") {
  const auto env = CookieEnvironment::finite({0.9, 0.6});
  const auto kernel = CouplingKernel::compile(KernelSpec::identity(), env);
  const auto joint = exact_coupled_distribution(kernel, 4);
  const auto single = exact_path_distribution(env, 4);
  KahanSum mass;
  for (const auto& atom : joint.atoms) {
    REQUIRE(atom.l_mask == atom.r_mask);
    CHECK(std::abs(atom.prob - single.prob[atom.l_mask]) < 1e-12);
    mass.add(atom.prob);
  }
  CHECK(std::abs(mass.value() - 1.0) < 1e-12);
}

TEST_CASE("coupled marginals recover the single-walk laws") {
  const auto env = CookieEnvironment::finite({0.7, 0.9, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::swap(1, 2), env);
  const int n = 6;
  const auto joint = exact_coupled_distribution(kernel, n);
  const auto ml = marginal_l(joint);
  const auto mr = marginal_r(joint);
  const auto lp = exact_path_distribution(kernel.p_env(), n);
  const auto rp = exact_path_distribution(kernel.q_env(), n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    CHECK(std::abs(ml.prob[mask] - lp.prob[mask]) < 1e-10);
    CHECK(std::abs(mr.prob[mask] - rp.prob[mask]) < 1e-10);
  }
}

TEST_CASE("every positive-probability atom satisfies the order statements") {
  const auto env = CookieEnvironment::finite({0.7, 0.9, 0.9});
  for (const auto& spec :
       {KernelSpec::swap(1, 2), KernelSpec::pointwise({0.9, 0.9, 0.9}),
        KernelSpec::compose({KernelSpec::swap(1, 2), KernelSpec::swap(2, 3)})}) {
    const auto kernel = CouplingKernel::compile(spec, env);
    const auto joint = exact_coupled_distribution(kernel, 6);
    const AtomCheckReport report = exact_order_check(joint);
    CHECK(report.atoms > 0);
    CHECK(report.violating_atoms == 0);
  }
}

TEST_CASE("dominance: equal environments give equality everywhere") {
  const auto report = exact_dominance_check(kSingle09, kSingle09, 6);
  CHECK(report.ok);
  for (const auto& row : report.rows) CHECK(row.gap == 0.0);
}

TEST_CASE("dominance for a pointwise increase, exact first-step gap") {
  const auto p = CookieEnvironment::finite({0.9});
  const auto q = CookieEnvironment::finite({0.95});
  const auto report = exact_dominance_check(p, q, 6);
  CHECK(report.ok);
  // the hitting-time CDF gap of level 1 at time 1 is exactly q1 - p1
  bool found = false;
  for (const auto& row : report.rows) {
    if (row.statistic == "hit_cdf" && row.threshold == 1 && row.time == 1) {
      CHECK(std::abs(row.value_p - 0.9) < 1e-12);
      CHECK(std::abs(row.value_q - 0.95) < 1e-12);
      CHECK(std::abs(row.gap - 0.05) < 1e-12);
      found = true;
    }
    if (row.statistic == "max_ge" && row.threshold == 1) {
      CHECK(row.gap > 0.0);  // strict at x = 1
    }
  }
  CHECK(found);
}

TEST_CASE("dominance for a favorable swap at depth 8") {
  const auto p = CookieEnvironment::finite({0.7, 0.9});
  const auto q = CookieEnvironment::finite({0.9, 0.7});
  const auto report = exact_dominance_check(p, q, 8);
  CHECK(report.ok);
  CHECK(report.worst_violation == 0.0);
}

TEST_CASE("dominance detects a genuinely non-dominated pair") {
  // q has a smaller first cookie, so P(hit 1 at time 1) drops
  const auto p = CookieEnvironment::finite({0.9});
  const auto q = CookieEnvironment::finite({0.6});
  const auto report = exact_dominance_check(p, q, 4);
  CHECK_FALSE(report.ok);
  CHECK(report.worst_violation > 0.0);
}

TEST_CASE("horizon guards") {
  const auto env = CookieEnvironment::finite({0.7, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::swap(1, 2), env);
  CHECK_THROWS_AS(exact_coupled_distribution(kernel, 9), std::invalid_argument);
  CHECK_THROWS_AS(exact_dominance_check(env, env, 15), std::invalid_argument);
}

TEST_CASE("monte carlo path frequencies match the exact law") {
  // one spot check here; the wider battery lives in the statistical suite
  const auto env = CookieEnvironment::finite({0.7, 0.9, 0.9});
  const int n = 6;
  const auto dist = exact_path_distribution(env, n);
  const int64_t replicas = 200000;
  std::vector<int64_t> counts(size_t{1} << n, 0);
  for (int64_t r = 0; r < replicas; ++r) {
    const WalkPath path =
        simulate_erw(env, SeedKey{20250810, static_cast<uint64_t>(r)}, n);
    uint32_t mask = 0;
    for (int m = 0; m < n; ++m) {
      if (path.positions[static_cast<size_t>(m + 1)] >
          path.positions[static_cast<size_t>(m)]) {
        mask |= 1u << m;
      }
    }
    ++counts[mask];
  }
  CHECK(chi_square_gof_pvalue(counts, dist.prob) > 0.001);
}
