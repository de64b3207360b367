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

#include "erw/walk.hpp"

namespace erw {

WalkPath simulate_erw(const CookieEnvironment& env, const SeedKey& key,
                      int64_t n) {
  if (n < 0) throw std::invalid_argument("simulate_erw: n must be >= 0");
  WalkPath path;
  path.positions.reserve(static_cast<size_t>(n) + 1);
  int64_t pos = 0;
  path.positions.push_back(pos);
  TwoSided<int64_t> departures;
  const uint64_t stream = key.stream_word();
  for (int64_t m = 0; m < n; ++m) {
    int64_t& count = departures.at(pos);
    const int64_t k = ++count;
    if (k > kMaxCookiesPerSite) {
      throw ReplicaAbort("per-site cookie cap exceeded at site " +
                         std::to_string(pos) + " after " + std::to_string(m) +
                         " steps");
    }
    const double u = keyed_uniform(stream, pos, 0, static_cast<uint64_t>(k));
    pos += u < env.cookie_prob(k) ? 1 : -1;
    path.positions.push_back(pos);
  }
  return path;
}

CoupledSample simulate_coupled(const CouplingKernel& kernel, const SeedKey& key,
                               int64_t n) {
  CoupledSample s;
  s.seed_key = key;
  s.source = std::make_shared<CoupledArrowSource>(kernel, key);
  s.l_system = std::make_shared<KernelArrowSystem>(s.source, WalkLane::kLeft);
  s.r_system = std::make_shared<KernelArrowSystem>(s.source, WalkLane::kRight);
  s.l_path = walk_from_arrows(*s.l_system, n);
  s.r_path = walk_from_arrows(*s.r_system, n);
  return s;
}

std::pair<int64_t, int64_t> inject_arrow_flip(CoupledSample& sample) {
  // A flip of z at (x, k) from 1 to 0 lowers every later z prefix sum by one,
  // so it breaks domination exactly when the slack sum(z) - sum(y) returns to
  // zero at or after k.
  for (int64_t x : sample.source->materialized_sites()) {
    const SitePairSample* cell = sample.source->find(x);
    const int64_t depth = static_cast<int64_t>(cell->y.size());
    std::vector<int64_t> slack(static_cast<size_t>(depth));
    int64_t sy = 0, sz = 0;
    for (int64_t k = 1; k <= depth; ++k) {
      sy += cell->y[static_cast<size_t>(k - 1)];
      sz += cell->z[static_cast<size_t>(k - 1)];
      slack[static_cast<size_t>(k - 1)] = sz - sy;
    }
    std::vector<int64_t> suffix_min(static_cast<size_t>(depth));
    int64_t cur = slack[static_cast<size_t>(depth - 1)];
    for (int64_t k = depth; k >= 1; --k) {
      cur = std::min(cur, slack[static_cast<size_t>(k - 1)]);
      suffix_min[static_cast<size_t>(k - 1)] = cur;
    }
    for (int64_t k = 1; k <= depth; ++k) {
      if (cell->z[static_cast<size_t>(k - 1)] == 1 &&
          suffix_min[static_cast<size_t>(k - 1)] == 0) {
        sample.source->flip_z(x, k);
        const int64_t n = sample.r_path.horizon();
        sample.r_path = walk_from_arrows(*sample.r_system, n);
        return {x, k};
      }
    }
  }
  throw std::logic_error("inject_arrow_flip: no cell qualifies for corruption");
}

}  // namespace erw
