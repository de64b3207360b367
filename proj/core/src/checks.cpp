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

#include "erw/checks.hpp"

#include <algorithm>

#include "erw/oracle.hpp"
#include "erw/parallel.hpp"

namespace erw {

PropertyReport& PropertyReport::operator+=(const PropertyReport& other) {
  prefix_domination_violations += other.prefix_domination_violations;
  hitting_order_violations += other.hitting_order_violations;
  running_max_violations += other.running_max_violations;
  running_min_violations += other.running_min_violations;
  visit_count_violations += other.visit_count_violations;
  inclusion_violations += other.inclusion_violations;
  duration_violations += other.duration_violations;
  indicator_violations += other.indicator_violations;
  return *this;
}

int64_t count_prefix_domination_violations(const CoupledSample& sample) {
  int64_t violations = 0;
  for (int64_t x : sample.source->materialized_sites()) {
    const SitePairSample* cell = sample.source->find(x);
    int64_t sum_y = 0, sum_z = 0;
    for (size_t k = 0; k < cell->y.size(); ++k) {
      sum_y += cell->y[k];
      sum_z += cell->z[k];
      if (sum_y > sum_z) ++violations;
    }
  }
  return violations;
}

PropertyReport check_order_properties(const CoupledSample& sample,
                                              int64_t guard) {
  PropertyReport report;
  report.prefix_domination_violations =
      count_prefix_domination_violations(sample);

  const auto& l = sample.l_path.positions;
  const auto& r = sample.r_path.positions;
  const size_t steps = std::min(l.size(), r.size());

  // Hitting-time ordering for every positive level L reaches.  A nearest
  // neighbour walk hits every level up to its max, so first hits over
  // 1..max(L) all exist.
  int64_t max_l = 0;
  for (int64_t x : l) max_l = std::max(max_l, x);
  int64_t max_r = 0;
  for (int64_t x : r) max_r = std::max(max_r, x);
  std::vector<int64_t> first_l(static_cast<size_t>(max_l) + 1, -1);
  for (size_t m = 0; m < l.size(); ++m) {
    if (l[m] >= 0 && first_l[static_cast<size_t>(l[m])] < 0) {
      first_l[static_cast<size_t>(l[m])] = static_cast<int64_t>(m);
    }
  }
  std::vector<int64_t> first_r(static_cast<size_t>(max_r) + 1, -1);
  for (size_t m = 0; m < r.size(); ++m) {
    if (r[m] >= 0 && first_r[static_cast<size_t>(r[m])] < 0) {
      first_r[static_cast<size_t>(r[m])] = static_cast<int64_t>(m);
    }
  }
  for (int64_t x = 1; x <= max_l; ++x) {
    if (x > max_r || first_r[static_cast<size_t>(x)] < 0 ||
        first_r[static_cast<size_t>(x)] > first_l[static_cast<size_t>(x)]) {
      ++report.hitting_order_violations;
    }
  }

  // Running extrema ordering at every time.
  {
    int64_t rmax_l = 0, rmax_r = 0, rmin_l = 0, rmin_r = 0;
    for (size_t m = 0; m < steps; ++m) {
      rmax_l = std::max(rmax_l, l[m]);
      rmax_r = std::max(rmax_r, r[m]);
      rmin_l = std::min(rmin_l, l[m]);
      rmin_r = std::min(rmin_r, r[m]);
      if (rmax_l > rmax_r) ++report.running_max_violations;
      if (rmin_l > rmin_r) ++report.running_min_violations;
    }
  }

  // Mutual regeneration structure plus the censored visit-count ordering.
  const MutualCheckResult mc = mutual_regeneration_check(sample, guard);
  report.inclusion_violations = mc.inclusion_violations;
  report.duration_violations = mc.duration_violations;
  report.indicator_violations = mc.indicator_violations;

  // Visit counts are settled only below a level both walks provably never
  // leave downwards within the horizon, so the bound intersects the mutual
  // levels with R's own full-window censored set.
  const RegenerationReport rr = find_regenerations(sample.r_path, guard);
  int64_t bound = -1;
  for (auto it = mc.mutual_levels.rbegin(); it != mc.mutual_levels.rend(); ++it) {
    if (std::binary_search(rr.levels.begin(), rr.levels.end(), *it)) {
      bound = *it;
      break;
    }
  }
  if (bound >= 0) {
    const VisitCounts vl = visit_counts(sample.l_path);
    const VisitCounts vr = visit_counts(sample.r_path);
    const int64_t lo = std::min(vl.min_site, vr.min_site);
    for (int64_t x = lo; x < bound; ++x) {
      if (vl.count_of(x) < vr.count_of(x)) ++report.visit_count_violations;
    }
  }
  return report;
}

CheckSuiteResult run_check_suite(const CouplingKernel& kernel, uint64_t seed,
                                 int64_t samples, int64_t horizon,
                                 int64_t guard, bool negative_control) {
  CheckSuiteResult result;
  result.samples = samples;

  std::vector<PropertyReport> reports(static_cast<size_t>(samples));
  parallel_replicas(samples, [&](int64_t r) {
    CoupledSample sample = simulate_coupled(
        kernel, SeedKey{seed, static_cast<uint64_t>(r)}, horizon);
    if (negative_control && r == 0) inject_arrow_flip(sample);
    reports[static_cast<size_t>(r)] = check_order_properties(sample, guard);
  });
  for (int64_t r = 0; r < samples; ++r) {
    const PropertyReport& rep = reports[static_cast<size_t>(r)];
    result.totals += rep;
    if (!rep.ok() && !result.first_failing_replica) {
      result.first_failing_replica = static_cast<uint64_t>(r);
    }
  }

  result.exact_horizon = 6;
  const auto joint = exact_coupled_distribution(kernel, result.exact_horizon);
  result.exact_atom_violations = exact_order_check(joint).violating_atoms;
  return result;
}

}  // namespace erw
