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

#include <memory>
#include <stdexcept>
#include <utility>

#include "erw/arrows.hpp"
#include "erw/coupling.hpp"
#include "erw/two_sided.hpp"

namespace erw {

// Memory safety net, not a truncation of the law: right-transient walks
// revisit a site a few times in practice.
inline constexpr int64_t kMaxCookiesPerSite = int64_t{1} << 20;

class ReplicaAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Excited random walk of n steps in env, driven by site-keyed cookie draws:
// the k-th cookie at site x is the same random variable no matter when the
// walk consumes it.  Deterministic given the seed key.
WalkPath simulate_erw(const CookieEnvironment& env, const SeedKey& key,
                      int64_t n);

// Shared per-site cookie realizations (Y, Z) backing both arrow systems of a
// coupled pair.  Buffers grow in closed windows and are never rewritten, so
// reads are idempotent and both walks see one fixed randomness.
class CoupledArrowSource {
 public:
  CoupledArrowSource(CouplingKernel kernel, SeedKey key)
      : kernel_(std::move(kernel)),
        key_(key),
        stream_word_(key.stream_word()) {}

  const CouplingKernel& kernel() const { return kernel_; }
  const SeedKey& seed_key() const { return key_; }

  const SitePairSample& ensure(int64_t site, int64_t depth) {
    SitePairSample& cell = cells_.at(site);
    if (static_cast<int64_t>(cell.y.size()) < depth) {
      if (depth > kMaxCookiesPerSite) {
        throw ReplicaAbort("per-site cookie cap exceeded at site " +
                           std::to_string(site) + " (depth " +
                           std::to_string(depth) + ")");
      }
      extend_site_pair(kernel_, stream_word_, site, depth, cell);
      if (corrupted_) {
        // Keep corrupted buffers usable: recompute sums without asserting.
        cell.sum_y = 0;
        cell.sum_z = 0;
        for (size_t t = 0; t < cell.y.size(); ++t) {
          cell.sum_y += cell.y[t];
          cell.sum_z += cell.z[t];
        }
      }
    }
    return cell;
  }

  const SitePairSample* find(int64_t site) const {
    const SitePairSample* cell = cells_.ptr(site);
    return (cell == nullptr || cell->y.empty()) ? nullptr : cell;
  }

  std::vector<int64_t> materialized_sites() const {
    std::vector<int64_t> sites;
    for (int64_t x = cells_.min_site(); x <= cells_.max_site(); ++x) {
      if (find(x) != nullptr) sites.push_back(x);
    }
    return sites;
  }

  // Negative-control hook: flips the sampled Z cookie at (site, k).  Marks
  // the source corrupted so later extensions skip the domination assert.
  bool flip_z(int64_t site, int64_t k) {
    if (!cells_.has(site)) return false;
    SitePairSample& cell = cells_.at(site);
    if (k < 1 || k > static_cast<int64_t>(cell.z.size())) return false;
    uint8_t& bit = cell.z[static_cast<size_t>(k - 1)];
    cell.sum_z += bit ? -1 : 1;
    bit ^= 1;
    corrupted_ = true;
    return true;
  }

  bool corrupted() const { return corrupted_; }

 private:
  CouplingKernel kernel_;
  SeedKey key_;
  uint64_t stream_word_;
  TwoSided<SitePairSample> cells_;
  bool corrupted_ = false;
};

enum class WalkLane { kLeft, kRight };

// Arrow-system view of one lane of a coupled source: L(x,k) = 2 Y_{x,k} - 1,
// R(x,k) = 2 Z_{x,k} - 1.
class KernelArrowSystem final : public ArrowSystem {
 public:
  KernelArrowSystem(std::shared_ptr<CoupledArrowSource> source, WalkLane lane)
      : source_(std::move(source)), lane_(lane) {}

  Step take(int64_t site, int64_t visit) override {
    const SitePairSample& cell = source_->ensure(site, visit);
    ++consulted_;
    const auto& bits = lane_ == WalkLane::kLeft ? cell.y : cell.z;
    return bits[static_cast<size_t>(visit - 1)] ? Step{1} : Step{-1};
  }

  std::optional<Step> peek(int64_t site, int64_t visit) const override {
    const SitePairSample* cell = source_->find(site);
    if (cell == nullptr || visit < 1 ||
        visit > static_cast<int64_t>(cell->y.size())) {
      return std::nullopt;
    }
    const auto& bits = lane_ == WalkLane::kLeft ? cell->y : cell->z;
    return bits[static_cast<size_t>(visit - 1)] ? Step{1} : Step{-1};
  }

  int64_t materialized_depth(int64_t site) const override {
    const SitePairSample* cell = source_->find(site);
    return cell == nullptr ? 0 : static_cast<int64_t>(cell->y.size());
  }

  std::vector<int64_t> materialized_sites() const override {
    return source_->materialized_sites();
  }

  int64_t consulted_cells() const override { return consulted_; }

  WalkLane lane() const { return lane_; }

 private:
  std::shared_ptr<CoupledArrowSource> source_;
  WalkLane lane_;
  int64_t consulted_ = 0;
};

// A coupled pair of arrow systems with their walks on shared randomness.
struct CoupledSample {
  std::shared_ptr<CoupledArrowSource> source;
  std::shared_ptr<KernelArrowSystem> l_system;
  std::shared_ptr<KernelArrowSystem> r_system;
  WalkPath l_path;
  WalkPath r_path;
  SeedKey seed_key;
};

CoupledSample simulate_coupled(const CouplingKernel& kernel, const SeedKey& key,
                               int64_t n);

// Flips one sampled Z cookie chosen so that prefix domination fails, then
// replays the R walk on the corrupted source.  Returns the flipped (site, k).
// Negative-control tool; throws std::logic_error when no cell qualifies.
std::pair<int64_t, int64_t> inject_arrow_flip(CoupledSample& sample);

}  // namespace erw
