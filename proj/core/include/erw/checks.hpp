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

#include "erw/regen.hpp"

namespace erw {

// Path-wise ordering checks on one coupled sample.  The liminf/limsup
// statements have no finite-horizon restatement and are exercised through
// speed comparisons instead; the visit-count check is censored to levels
// strictly left of the last mutual regeneration level, where both walks have
// provably completed all visits.
struct PropertyReport {
  int64_t prefix_domination_violations = 0;
  int64_t hitting_order_violations = 0;  // R first-hits no later than L
  int64_t running_max_violations = 0;
  int64_t running_min_violations = 0;
  int64_t visit_count_violations = 0;  // censored visit-count ordering
  int64_t inclusion_violations = 0;    // regeneration-set inclusion
  int64_t duration_violations = 0;     // block-duration domination
  int64_t indicator_violations = 0;    // level-0 indicator ordering

  int64_t total() const {
    return prefix_domination_violations + hitting_order_violations +
           running_max_violations + running_min_violations +
           visit_count_violations + inclusion_violations +
           duration_violations + indicator_violations;
  }
  bool ok() const { return total() == 0; }

  PropertyReport& operator+=(const PropertyReport& other);
};

// Domination of cumulative arrow sums over every materialized cell of the
// sample's shared source.
int64_t count_prefix_domination_violations(const CoupledSample& sample);

PropertyReport check_order_properties(const CoupledSample& sample,
                                              int64_t guard);

struct CheckSuiteResult {
  int64_t samples = 0;
  PropertyReport totals;
  std::optional<uint64_t> first_failing_replica;
  // exact joint enumeration at a small horizon, zero expected
  int64_t exact_atom_violations = 0;
  int exact_horizon = 0;
  bool ok() const { return totals.ok() && exact_atom_violations == 0; }
};

// Runs every path-wise checker over Monte Carlo samples and, at a small
// horizon, over the exact joint enumeration.  With negative_control set, one
// sampled arrow of replica 0 is flipped; the suite is then expected to fail.
CheckSuiteResult run_check_suite(const CouplingKernel& kernel, uint64_t seed,
                                 int64_t samples, int64_t horizon,
                                 int64_t guard, bool negative_control);

}  // namespace erw
