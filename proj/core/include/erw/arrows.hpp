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
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erw {

using Step = int8_t;  // +1 or -1

// Nearest-neighbour path from the origin: positions[m] = X_m, X_0 = 0.
struct WalkPath {
  std::vector<int64_t> positions;
  int64_t horizon() const { return static_cast<int64_t>(positions.size()) - 1; }
};

std::optional<int64_t> hitting_time(const WalkPath& path, int64_t level);
std::vector<int64_t> running_max_series(const WalkPath& path);
std::vector<int64_t> running_min_series(const WalkPath& path);

// Occupation counts #{m <= n : X_m = x}; count_of() is 0 off the visited range.
struct VisitCounts {
  int64_t min_site = 0;
  std::vector<int64_t> counts;
  int64_t count_of(int64_t site) const {
    const int64_t idx = site - min_site;
    if (idx < 0 || idx >= static_cast<int64_t>(counts.size())) return 0;
    return counts[static_cast<size_t>(idx)];
  }
};
VisitCounts visit_counts(const WalkPath& path);

// An arrow system assigns a step to every (site, visit) cell and drives a
// walk deterministically: the k-th departure from x follows the arrow at
// (x, k).  Cells materialize on first consumption (take); peek never creates
// randomness, so checks replay exactly what a simulation saw.
class ArrowSystem {
 public:
  virtual ~ArrowSystem() = default;

  // Consumes the cell, materializing it if needed (simulation path).
  virtual Step take(int64_t site, int64_t visit) = 0;

  // Read-only; nullopt when the cell was never materialized.
  virtual std::optional<Step> peek(int64_t site, int64_t visit) const = 0;

  virtual int64_t materialized_depth(int64_t site) const = 0;
  virtual std::vector<int64_t> materialized_sites() const = 0;

  // Number of cells consumed through take(); at most the walk length.
  virtual int64_t consulted_cells() const = 0;
};

// Explicit arrow table for tests and documentation examples; optionally
// backed by a constant fill for cells beyond the table.
class FixtureArrowSystem final : public ArrowSystem {
 public:
  FixtureArrowSystem() = default;
  explicit FixtureArrowSystem(std::map<int64_t, std::vector<Step>> table,
                              std::optional<Step> fill = std::nullopt);

  Step take(int64_t site, int64_t visit) override;
  std::optional<Step> peek(int64_t site, int64_t visit) const override;
  int64_t materialized_depth(int64_t site) const override;
  std::vector<int64_t> materialized_sites() const override;
  int64_t consulted_cells() const override { return consulted_; }

  const std::map<int64_t, std::vector<Step>>& table() const { return table_; }

 private:
  std::map<int64_t, std::vector<Step>> table_;
  std::optional<Step> fill_;
  int64_t consulted_ = 0;
};

// Plain-text arrow-table format, one line per site: "x: + - + ...".
FixtureArrowSystem parse_arrow_table(const std::string& text);
std::string format_arrow_table(const FixtureArrowSystem& fixture);

// Deterministic walk of n steps driven by the arrow system.
WalkPath walk_from_arrows(ArrowSystem& system, int64_t n);

struct SiteWindow {
  int64_t lo = 0;
  int64_t hi = 0;  // inclusive
};

// Cumulative arrow sums of L never exceed R's at any (site, visit) inside
// the window.  Throws std::out_of_range if the window reaches cells that
// were never materialized in either system (checking must not create
// randomness).
bool prefix_dominates(const ArrowSystem& l, const ArrowSystem& r,
                      SiteWindow sites, int64_t depth);

}  // namespace erw
