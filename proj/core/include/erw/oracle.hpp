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
#include <string>
#include <vector>

#include "erw/arrows.hpp"
#include "erw/coupling.hpp"
#include "erw/env.hpp"

namespace erw {

// Horizon guards sized for sub-minute runs.
inline constexpr int kMaxExactPathHorizon = 20;
inline constexpr int kMaxExactJointHorizon = 8;
inline constexpr int kMaxExactDominanceHorizon = 14;

// Exact law of the first n steps.  Paths are encoded as step masks: bit m
// set means step m+1 goes right.  Small horizons (n <= 10) are computed in
// exact rational arithmetic and rounded once at the end; larger horizons use
// compensated summation.
struct ExactPathDistribution {
  int horizon = 0;
  std::vector<double> prob;  // size 2^horizon, indexed by step mask
};

ExactPathDistribution exact_path_distribution(const CookieEnvironment& env,
                                              int n);

WalkPath decode_path(uint32_t mask, int horizon);

double total_mass(const ExactPathDistribution& dist);
double terminal_value_probability(const ExactPathDistribution& dist,
                                  int64_t value);
double hit_level_by_time_probability(const ExactPathDistribution& dist,
                                     int64_t level, int64_t time);
double running_max_at_least_probability(const ExactPathDistribution& dist,
                                        int64_t level);
double running_min_at_most_probability(const ExactPathDistribution& dist,
                                       int64_t level);

// Exact joint law of the coupled walk pair to horizon n.
struct ExactJointAtom {
  uint32_t l_mask = 0;
  uint32_t r_mask = 0;
  double prob = 0.0;
};

struct ExactCoupledDistribution {
  int horizon = 0;
  std::vector<ExactJointAtom> atoms;  // sorted by (l_mask, r_mask)
};

ExactCoupledDistribution exact_coupled_distribution(const CouplingKernel& kernel,
                                                    int n);

ExactPathDistribution marginal_l(const ExactCoupledDistribution& dist);
ExactPathDistribution marginal_r(const ExactCoupledDistribution& dist);

// Hitting-time and running-extrema ordering restated at the horizon, checked
// on every positive-probability atom.
struct AtomCheckReport {
  int64_t atoms = 0;
  int64_t violating_atoms = 0;
  double violating_mass = 0.0;
};
AtomCheckReport exact_order_check(const ExactCoupledDistribution& dist);

// Law-level stochastic dominance of running maxima, running minima and
// hitting-time CDFs between two environments, from their exact path laws.
struct DominanceRow {
  std::string statistic;  // "max_ge", "min_le", "hit_cdf"
  int64_t threshold = 0;
  int64_t time = 0;  // hit_cdf only
  double value_p = 0.0;
  double value_q = 0.0;
  double gap = 0.0;  // oriented so that >= 0 means dominance holds
};

struct DominanceReport {
  bool ok = true;
  double worst_violation = 0.0;
  std::vector<DominanceRow> rows;
};

DominanceReport exact_dominance_check(const CookieEnvironment& p,
                                      const CookieEnvironment& q, int n);

}  // namespace erw
