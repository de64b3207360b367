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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "erw/stats.hpp"
#include "erw/walk.hpp"

namespace erw {

struct RegenBlock {
  int64_t displacement = 0;
  int64_t duration = 0;
};

struct CensorMeta {
  int64_t horizon = 0;
  int64_t guard = 0;
  int64_t discarded_edge_blocks = 0;
};

// Censored regeneration levels of a finite path.  A level x >= 0 qualifies
// when the path hits x, never goes strictly below x afterwards within the
// horizon, and the running max reaches x + guard; levels failing the guard
// are censored rather than reported.
struct RegenerationReport {
  std::vector<int64_t> levels;           // ascending
  std::vector<int64_t> level_hit_times;  // first hits, parallel to levels
  bool zero_is_regen = false;
  CensorMeta censor;
  std::vector<RegenBlock> blocks;  // between consecutive confirmed levels
};

RegenerationReport find_regenerations(const WalkPath& path, int64_t guard);

// Mutual checks on a coupled sample: censored set inclusion of L's levels in
// R's, block-duration domination at the mutual levels, and the indicator
// ordering for level 0.  R's membership at a level is evaluated over the
// time-matched window [t_R, t_R + (n - t_L)]; beyond it R's clock has run
// longer than L's and the ordering makes no claim.
struct MutualCheckResult {
  int64_t inclusion_violations = 0;
  int64_t duration_violations = 0;
  int64_t indicator_violations = 0;
  std::vector<int64_t> mutual_levels;
  std::vector<int64_t> block_disp;
  std::vector<int64_t> block_dur_l;
  std::vector<int64_t> block_dur_r;
  bool zero_in_l = false;
  bool zero_in_r = false;
  bool ok() const {
    return inclusion_violations == 0 && duration_violations == 0 &&
           indicator_violations == 0;
  }
};

MutualCheckResult mutual_regeneration_check(const CoupledSample& sample,
                                            int64_t guard);

struct SpeedEstimate {
  double value = 0.0;
  ConfidenceInterval ci95;
  ConfidenceInterval ci99;
  std::string method;  // "regeneration-ratio" | "naive"
  int64_t block_count = 0;
  int64_t replica_count = 0;
  bool zero_speed_caveat = false;
};

struct GuardSensitivityRow {
  int64_t guard = 0;
  double value = 0.0;
  ConfidenceInterval ci95;
  int64_t block_count = 0;
};

struct SpeedReport {
  SpeedEstimate estimate;
  std::vector<GuardSensitivityRow> sensitivity;
};

class InsufficientRegenerations : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kBootstrapResamples = 2000;
inline constexpr int64_t kMinInteriorBlocks = 10;
inline constexpr int64_t kSensitivityGuards[] = {10, 50, 200};

// Ratio estimator sum(displacements)/sum(durations) over interior blocks
// pooled across replicas, with percentile-bootstrap confidence intervals
// over replica clusters.  Throws InsufficientRegenerations below
// kMinInteriorBlocks pooled blocks.
SpeedReport speed_regeneration(const CookieEnvironment& env, uint64_t seed,
                               int64_t replicas, int64_t horizon,
                               int64_t guard);

struct PairedSpeedReport {
  SpeedEstimate p_speed;
  SpeedEstimate q_speed;
  SpeedEstimate paired_diff;
  int64_t duration_violations = 0;  // expected zero
  int64_t inclusion_violations = 0;
  std::vector<GuardSensitivityRow> diff_sensitivity;
};

// Both speeds from the same coupled samples: shared displacement numerators
// at L's mutual regeneration levels, denominators from each walk's hitting
// times.  Block-duration domination makes q's estimate >= p's on every run.
PairedSpeedReport coupled_speed_pair(const CouplingKernel& kernel,
                                     uint64_t seed, int64_t replicas,
                                     int64_t horizon, int64_t guard);

struct RegenProbabilityReport {
  int64_t replicas = 0;
  double eps_p = 0.0;
  ConfidenceInterval eps_p_ci95;
  ConfidenceInterval eps_p_ci99;
  // kernel runs only:
  std::optional<double> eps_q;
  ConfidenceInterval eps_q_ci95;
  double diff = 0.0;
  ConfidenceInterval diff_ci95;
  ConfidenceInterval diff_ci99;
  int64_t indicator_violations = 0;
  // strictly-positive-excursion frequencies (X_m > 0 for all 0 < m <= n),
  // reported for comparison, no path-wise ordering is asserted
  double strict_positive_p = 0.0;
  std::optional<double> strict_positive_q;
};

RegenProbabilityReport regen_probability(const CookieEnvironment& env,
                                         uint64_t seed, int64_t replicas,
                                         int64_t horizon, int64_t guard);
RegenProbabilityReport regen_probability(const CouplingKernel& kernel,
                                         uint64_t seed, int64_t replicas,
                                         int64_t horizon, int64_t guard);

struct WitnessReport {
  int m0 = 0;
  int64_t replicas = 0;
  int64_t witness_count = 0;
  double frequency = 0.0;
  int64_t conditional_violations = 0;  // expected zero
};

// Frequency of the explicit local configuration that forces the R walk to
// reach the first regeneration level strictly sooner than L: right cookies
// at site 0 up to m0+1 for both walks, left L-cookies and a right R-cookie
// at site 1 around index m0, and level 2 confirmed as a regeneration level
// for both walks.  On every such replica the hitting-time gap is asserted.
WitnessReport witness_event_frequency(const CouplingKernel& kernel,
                                      uint64_t seed, int64_t replicas,
                                      int64_t horizon, int64_t guard);

// Mean of X_n / n across replicas with normal-approximation intervals.
SpeedEstimate naive_speed(const CookieEnvironment& env, uint64_t seed,
                          int64_t replicas, int64_t horizon);

}  // namespace erw
