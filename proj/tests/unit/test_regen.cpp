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

#include <numeric>

#include "erw/checks.hpp"
#include "erw/regen.hpp"

using namespace erw;

namespace {
WalkPath make_path(std::vector<int64_t> positions) {
  WalkPath p;
  p.positions = std::move(positions);
  return p;
}
}  // namespace

TEST_CASE("monotone path: every level except the guard margin") {
  std::vector<int64_t> up(21);
  std::iota(up.begin(), up.end(), 0);
  const auto report = find_regenerations(make_path(up), 5);
  std::vector<int64_t> expected(16);
  std::iota(expected.begin(), expected.end(), 0);  // 0..15
  CHECK(report.levels == expected);
  CHECK(report.zero_is_regen);
  CHECK(report.blocks.size() == 15);
  for (const auto& b : report.blocks) {
    CHECK(b.displacement == 1);
    CHECK(b.duration == 1);
  }
  CHECK(report.censor.discarded_edge_blocks == 1);  // trailing segment only
}

TEST_CASE("leftward path has no regeneration levels") {
  const auto report = find_regenerations(make_path({0, -1, -2, -3}), 2);
  CHECK(report.levels.empty());
  CHECK_FALSE(report.zero_is_regen);
}

TEST_CASE("hand-traced censoring with the first-hit rule") {
  // path 0,1,0,1,2,3,4,5,6: level 1 fails (the walk returns to 0 after the
  // first hit at time 1); 0 and 2..4 qualify at guard 2 (max = 6)
  const auto report =
      find_regenerations(make_path({0, 1, 0, 1, 2, 3, 4, 5, 6}), 2);
  CHECK(report.levels == std::vector<int64_t>{0, 2, 3, 4});
  CHECK(report.zero_is_regen);
  CHECK(report.level_hit_times == std::vector<int64_t>{0, 4, 5, 6});
  // block 0 -> 2 spans displacement 2, duration 4
  REQUIRE(report.blocks.size() == 3);
  CHECK(report.blocks[0].displacement == 2);
  CHECK(report.blocks[0].duration == 4);
}

TEST_CASE("block consistency: sums telescope") {
  const auto path = make_path({0, 1, 0, 1, 2, 3, 2, 3, 4, 5, 6, 7, 8});
  const auto report = find_regenerations(path, 3);
  REQUIRE(report.levels.size() >= 2);
  int64_t disp = 0, dur = 0;
  for (const auto& b : report.blocks) {
    disp += b.displacement;
    dur += b.duration;
  }
  CHECK(disp == report.levels.back() - report.levels.front());
  CHECK(dur == report.level_hit_times.back() - report.level_hit_times.front());
}

TEST_CASE("censoring consistency: larger guards never add levels") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  for (uint64_t r = 0; r < 50; ++r) {
    const WalkPath path = simulate_erw(env, SeedKey{21, r}, 2000);
    const auto loose = find_regenerations(path, 10);
    const auto tight = find_regenerations(path, 200);
    CHECK(tight.levels.size() <= loose.levels.size());
    for (int64_t x : tight.levels) {
      CHECK(std::binary_search(loose.levels.begin(), loose.levels.end(), x));
    }
  }
}

TEST_CASE("mutual check is an equality for the identity kernel") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::identity(), env);
  const CoupledSample s = simulate_coupled(kernel, SeedKey{22, 4}, 3000);
  const MutualCheckResult mc = mutual_regeneration_check(s, 50);
  CHECK(mc.ok());
  for (size_t i = 0; i < mc.block_disp.size(); ++i) {
    CHECK(mc.block_dur_l[i] == mc.block_dur_r[i]);
  }
  CHECK(mc.zero_in_l == mc.zero_in_r);
}

TEST_CASE("mutual check holds over many swap-kernel samples") {
  const auto env = CookieEnvironment::finite({0.7, 0.9, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::swap(1, 2), env);
  for (uint64_t r = 0; r < 300; ++r) {
    const CoupledSample s = simulate_coupled(kernel, SeedKey{23, r}, 1500);
    const MutualCheckResult mc = mutual_regeneration_check(s, 50);
    REQUIRE(mc.inclusion_violations == 0);
    REQUIRE(mc.duration_violations == 0);
    REQUIRE(mc.indicator_violations == 0);
  }
}

TEST_CASE("corrupted sample fails the mutual or domination checks") {
  const auto env = CookieEnvironment::finite({0.7, 0.9, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::swap(1, 2), env);
  CoupledSample s = simulate_coupled(kernel, SeedKey{24, 9}, 1500);
  inject_arrow_flip(s);
  const MutualCheckResult mc = mutual_regeneration_check(s, 50);
  const int64_t domination = count_prefix_domination_violations(s);
  CHECK((domination > 0 || !mc.ok()));
}

TEST_CASE("speed estimator on a strongly transient environment") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const SpeedReport report = speed_regeneration(env, 31, 40, 20000, 50);
  CHECK(report.estimate.value > 0.0);
  CHECK(report.estimate.ci99.lo > 0.0);
  CHECK(report.estimate.block_count >= kMinInteriorBlocks);
  CHECK_FALSE(report.estimate.zero_speed_caveat);
  CHECK(report.estimate.method == "regeneration-ratio");
  // sensitivity rows cover the standard guards
  REQUIRE(report.sensitivity.size() >= 3);
  CHECK(report.sensitivity.front().guard == 10);
  CHECK(report.sensitivity.back().guard == 200);

  // naive estimator agrees within the union of 99% intervals
  const SpeedEstimate naive = naive_speed(env, 32, 40, 20000);
  const double lo = std::min(report.estimate.ci99.lo, naive.ci99.lo);
  const double hi = std::max(report.estimate.ci99.hi, naive.ci99.hi);
  CHECK(report.estimate.value >= lo);
  CHECK(report.estimate.value <= hi);
  CHECK(naive.value >= lo);
  CHECK(naive.value <= hi);
}

TEST_CASE("stronger cookies give a larger regeneration estimate") {
  const auto fast = CookieEnvironment::finite({0.99, 0.99, 0.99});
  const auto slow = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const SpeedReport f = speed_regeneration(fast, 30, 30, 10000, 50);
  const SpeedReport s = speed_regeneration(slow, 30, 30, 10000, 50);
  CHECK(f.estimate.value > s.estimate.value);
}

TEST_CASE("recurrent environment yields insufficient regenerations") {
  // at horizon 400 the running max of a fair walk rarely clears guard 50,
  // so censoring leaves no confirmed levels
  const auto env = CookieEnvironment::finite({0.5});
  CHECK_THROWS_AS(speed_regeneration(env, 33, 10, 400, 50),
                  InsufficientRegenerations);
}

TEST_CASE("paired estimator orders the speeds deterministically") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const auto kernel =
      CouplingKernel::compile(KernelSpec::pointwise({0.95, 0.9, 0.9}), env);
  const PairedSpeedReport report = coupled_speed_pair(kernel, 34, 40, 20000, 50);
  CHECK(report.duration_violations == 0);
  CHECK(report.inclusion_violations == 0);
  CHECK(report.paired_diff.value >= 0.0);
  CHECK(report.q_speed.value >= report.p_speed.value);
  CHECK(report.p_speed.block_count == report.q_speed.block_count);
}

TEST_CASE("identity kernel gives an exactly zero paired difference") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::identity(), env);
  const PairedSpeedReport report = coupled_speed_pair(kernel, 35, 20, 10000, 50);
  CHECK(report.paired_diff.value == 0.0);
  CHECK(report.paired_diff.ci99.lo == 0.0);
  CHECK(report.paired_diff.ci99.hi == 0.0);
}

TEST_CASE("regeneration probability estimates") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const RegenProbabilityReport rep = regen_probability(env, 36, 20000, 1500, 50);
  CHECK(rep.eps_p > 0.0);
  CHECK(rep.eps_p_ci99.lo > 0.0);

  const auto kernel = CouplingKernel::compile(
      KernelSpec::swap(1, 2), CookieEnvironment::finite({0.7, 0.9, 0.9}));
  const RegenProbabilityReport pair = regen_probability(kernel, 37, 20000, 1500, 50);
  CHECK(pair.indicator_violations == 0);
  REQUIRE(pair.eps_q.has_value());
  CHECK(*pair.eps_q >= pair.eps_p);
  CHECK(pair.diff >= 0.0);
}

TEST_CASE("identity kernel: regeneration probabilities coincide per sample") {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const auto kernel = CouplingKernel::compile(KernelSpec::identity(), env);
  const RegenProbabilityReport rep = regen_probability(kernel, 38, 5000, 1000, 50);
  CHECK(rep.eps_p == *rep.eps_q);
  CHECK(rep.diff == 0.0);
  CHECK(rep.indicator_violations == 0);
}

TEST_CASE("witness event frequency and conditional hitting-time gap") {
  const auto kernel = CouplingKernel::compile(
      KernelSpec::swap(1, 2), CookieEnvironment::finite({0.7, 0.9, 0.9}));
  const WitnessReport rep = witness_event_frequency(kernel, 39, 20000, 1500, 50);
  CHECK(rep.m0 == 1);
  CHECK(rep.witness_count > 0);
  CHECK(rep.conditional_violations == 0);
  CHECK(rep.frequency > 0.0);
  CHECK(rep.frequency < 1.0);

  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const auto identity = CouplingKernel::compile(KernelSpec::identity(), env);
  CHECK_THROWS_AS(witness_event_frequency(identity, 40, 10, 100, 10),
                  std::domain_error);
}

TEST_CASE("naive speed carries the zero-speed caveat below the threshold") {
  const auto zero_env = CookieEnvironment::finite({0.9, 0.9});  // drift sum 1.6
  const SpeedEstimate est = naive_speed(zero_env, 41, 50, 5000);
  CHECK(est.zero_speed_caveat);
  const auto fast_env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  CHECK_FALSE(naive_speed(fast_env, 42, 50, 5000).zero_speed_caveat);
  const auto fair = CookieEnvironment::finite({0.5});
  const SpeedEstimate fair_est = naive_speed(fair, 43, 200, 2000);
  CHECK(fair_est.ci95.contains(0.0));
}
