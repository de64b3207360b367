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

// Internal: exact enumeration of a kernel's per-site joint cookie law.
//
// Cookie indices 1..D (D a closed window) split into "units": connected
// components under the swap pairs of every stage.  Distinct units are
// independent; within a unit the joint law of (Y, Z) is a small atom table
// obtained by pushing each y-assignment through the stage chain.  Scalar is
// double for fast enumeration or an exact rational type for the oracle.

#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "erw/coupling.hpp"

namespace erw::detail {

template <typename Scalar>
struct KernelUnit {
  std::vector<int64_t> indices;  // ascending 1-based cookie indices
  struct Atom {
    uint32_t y = 0;  // bit t = value at indices[t]
    uint32_t z = 0;
    Scalar prob;
  };
  std::vector<Atom> atoms;
};

template <typename Scalar>
std::vector<KernelUnit<Scalar>> kernel_units(const CouplingKernel& kernel,
                                             int64_t depth_closed) {
  const int64_t d = depth_closed;
  std::vector<int64_t> parent(static_cast<size_t>(d) + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int64_t(int64_t)> find = [&](int64_t x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int64_t a, int64_t b) { parent[static_cast<size_t>(find(a))] = find(b); };

  for (const auto& st : kernel.stages()) {
    if (st.kind != KernelSpec::Kind::kSwap) continue;
    for (int64_t k = 1; k <= d; ++k) {
      const auto pair = st.swap_pair_of(k);
      if (pair && pair->second <= d) unite(pair->first, pair->second);
    }
  }

  // Group indices by component root, keeping ascending order.
  std::vector<std::vector<int64_t>> groups(static_cast<size_t>(d) + 1);
  for (int64_t k = 1; k <= d; ++k) groups[static_cast<size_t>(find(k))].push_back(k);

  std::vector<KernelUnit<Scalar>> units;
  for (auto& g : groups) {
    if (g.empty()) continue;
    KernelUnit<Scalar> unit;
    unit.indices = std::move(g);
    const int m = static_cast<int>(unit.indices.size());

    // Position of a cookie index inside the unit.
    auto bit_of = [&](int64_t k) {
      for (int t = 0; t < m; ++t) {
        if (unit.indices[static_cast<size_t>(t)] == k) return t;
      }
      return -1;
    };

    // Stage pairs wholly contained in this unit, for each swap stage.
    struct StagePairs {
      const CompiledStage* stage;
      std::vector<std::pair<int, int>> bit_pairs;  // (bit of i, bit of j)
    };
    std::vector<StagePairs> chain;
    for (const auto& st : kernel.stages()) {
      StagePairs sp{&st, {}};
      if (st.kind == KernelSpec::Kind::kSwap) {
        for (int t = 0; t < m; ++t) {
          const auto pair = st.swap_pair_of(unit.indices[static_cast<size_t>(t)]);
          if (pair && pair->first == unit.indices[static_cast<size_t>(t)] &&
              pair->second <= d) {
            sp.bit_pairs.emplace_back(t, bit_of(pair->second));
          }
        }
      }
      chain.push_back(std::move(sp));
    }

    // Pushes bits w through stages [s..) multiplying branch probabilities.
    std::function<void(size_t, uint32_t, uint32_t, const Scalar&)> run_stages =
        [&](size_t s, uint32_t ybits, uint32_t w, const Scalar& prob) {
          if (s == chain.size()) {
            unit.atoms.push_back({ybits, w, prob});
            return;
          }
          const CompiledStage& st = *chain[s].stage;
          if (st.kind == KernelSpec::Kind::kIdentity) {
            run_stages(s + 1, ybits, w, prob);
            return;
          }
          if (st.kind == KernelSpec::Kind::kPointwise) {
            std::function<void(int, uint32_t, const Scalar&)> per_index =
                [&](int t, uint32_t cur, const Scalar& pr) {
                  if (t == m) {
                    run_stages(s + 1, ybits, cur, pr);
                    return;
                  }
                  const int64_t k = unit.indices[static_cast<size_t>(t)];
                  if ((cur >> t) & 1u) {
                    per_index(t + 1, cur, pr);
                    return;
                  }
                  const Scalar pk(st.in.cookie_prob(k));
                  const Scalar qk(st.out.cookie_prob(k));
                  if (qk == pk) {
                    per_index(t + 1, cur, pr);
                    return;
                  }
                  const Scalar c = (qk - pk) / (Scalar(1) - pk);
                  per_index(t + 1, cur | (1u << t), pr * c);
                  per_index(t + 1, cur, pr * (Scalar(1) - c));
                };
            per_index(0, w, prob);
            return;
          }
          // swap stage
          const auto& pairs = chain[s].bit_pairs;
          std::function<void(size_t, uint32_t, const Scalar&)> per_pair =
              [&](size_t pi, uint32_t cur, const Scalar& pr) {
                if (pi == pairs.size()) {
                  run_stages(s + 1, ybits, cur, pr);
                  return;
                }
                const auto [bi, bj] = pairs[pi];
                const bool wi = (cur >> bi) & 1u;
                const bool wj = (cur >> bj) & 1u;
                if (!wi && wj) {
                  const Scalar a(st.mix_a);
                  per_pair(pi + 1, (cur | (1u << bi)) & ~(1u << bj), pr * a);
                  per_pair(pi + 1, cur, pr * (Scalar(1) - a));
                } else {
                  per_pair(pi + 1, cur, pr);
                }
              };
          per_pair(0, w, prob);
        };

    const CookieEnvironment& p = kernel.p_env();
    for (uint32_t ybits = 0; ybits < (1u << m); ++ybits) {
      Scalar prob(1);
      for (int t = 0; t < m; ++t) {
        const Scalar pk(p.cookie_prob(unit.indices[static_cast<size_t>(t)]));
        prob = prob * (((ybits >> t) & 1u) ? pk : Scalar(1) - pk);
      }
      run_stages(0, ybits, ybits, prob);
    }
    units.push_back(std::move(unit));
  }
  return units;
}

// Calls cb(y_mask, z_mask, prob) for every atom of the exact joint law on
// cookie indices 1..closed(depth); bit k-1 of a mask holds cookie k.
template <typename Scalar>
void enumerate_joint(
    const CouplingKernel& kernel, int64_t depth,
    const std::function<void(uint64_t, uint64_t, const Scalar&)>& cb) {
  const int64_t d = closed_depth(kernel, depth);
  const auto units = kernel_units<Scalar>(kernel, d);
  std::function<void(size_t, uint64_t, uint64_t, const Scalar&)> rec =
      [&](size_t u, uint64_t y, uint64_t z, const Scalar& prob) {
        if (u == units.size()) {
          cb(y, z, prob);
          return;
        }
        const auto& unit = units[u];
        for (const auto& atom : unit.atoms) {
          uint64_t ay = y, az = z;
          for (size_t t = 0; t < unit.indices.size(); ++t) {
            const uint64_t bit = uint64_t{1} << (unit.indices[t] - 1);
            if ((atom.y >> t) & 1u) ay |= bit;
            if ((atom.z >> t) & 1u) az |= bit;
          }
          rec(u + 1, ay, az, prob * atom.prob);
        }
      };
  rec(0, 0, 0, Scalar(1));
}

}  // namespace erw::detail
