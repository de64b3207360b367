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

#include "erw/arrows.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "erw/two_sided.hpp"

namespace erw {

std::optional<int64_t> hitting_time(const WalkPath& path, int64_t level) {
  for (size_t m = 0; m < path.positions.size(); ++m) {
    if (path.positions[m] == level) return static_cast<int64_t>(m);
  }
  return std::nullopt;
}

std::vector<int64_t> running_max_series(const WalkPath& path) {
  std::vector<int64_t> out(path.positions.size());
  int64_t cur = path.positions.empty() ? 0 : path.positions[0];
  for (size_t m = 0; m < path.positions.size(); ++m) {
    cur = std::max(cur, path.positions[m]);
    out[m] = cur;
  }
  return out;
}

std::vector<int64_t> running_min_series(const WalkPath& path) {
  std::vector<int64_t> out(path.positions.size());
  int64_t cur = path.positions.empty() ? 0 : path.positions[0];
  for (size_t m = 0; m < path.positions.size(); ++m) {
    cur = std::min(cur, path.positions[m]);
    out[m] = cur;
  }
  return out;
}

VisitCounts visit_counts(const WalkPath& path) {
  VisitCounts vc;
  if (path.positions.empty()) return vc;
  const auto [lo, hi] =
      std::minmax_element(path.positions.begin(), path.positions.end());
  vc.min_site = *lo;
  vc.counts.assign(static_cast<size_t>(*hi - *lo + 1), 0);
  for (int64_t x : path.positions) {
    ++vc.counts[static_cast<size_t>(x - vc.min_site)];
  }
  return vc;
}

FixtureArrowSystem::FixtureArrowSystem(std::map<int64_t, std::vector<Step>> table,
                                       std::optional<Step> fill)
    : table_(std::move(table)), fill_(fill) {
  for (const auto& [site, steps] : table_) {
    for (Step s : steps) {
      if (s != 1 && s != -1) {
        throw std::invalid_argument("arrow table entries must be +1 or -1 (site " +
                                    std::to_string(site) + ")");
      }
    }
  }
  if (fill_ && *fill_ != 1 && *fill_ != -1) {
    throw std::invalid_argument("arrow fill must be +1 or -1");
  }
}

Step FixtureArrowSystem::take(int64_t site, int64_t visit) {
  const auto got = peek(site, visit);
  if (!got) {
    throw std::out_of_range("arrow table has no cell (" + std::to_string(site) +
                            ", " + std::to_string(visit) + ")");
  }
  ++consulted_;
  return *got;
}

std::optional<Step> FixtureArrowSystem::peek(int64_t site, int64_t visit) const {
  if (visit < 1) return std::nullopt;
  const auto it = table_.find(site);
  if (it != table_.end() &&
      visit <= static_cast<int64_t>(it->second.size())) {
    return it->second[static_cast<size_t>(visit - 1)];
  }
  return fill_;
}

int64_t FixtureArrowSystem::materialized_depth(int64_t site) const {
  const auto it = table_.find(site);
  return it == table_.end() ? 0 : static_cast<int64_t>(it->second.size());
}

std::vector<int64_t> FixtureArrowSystem::materialized_sites() const {
  std::vector<int64_t> sites;
  sites.reserve(table_.size());
  for (const auto& [site, _] : table_) sites.push_back(site);
  return sites;
}

FixtureArrowSystem parse_arrow_table(const std::string& text) {
  std::map<int64_t, std::vector<Step>> table;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("arrow table line " + std::to_string(lineno) +
                                  ": expected \"site: steps\"");
    }
    int64_t site = 0;
    try {
      site = std::stoll(line.substr(0, colon));
    } catch (const std::exception&) {
      throw std::invalid_argument("arrow table line " + std::to_string(lineno) +
                                  ": bad site index");
    }
    std::vector<Step> steps;
    std::istringstream rest(line.substr(colon + 1));
    std::string tok;
    while (rest >> tok) {
      if (tok == "+" || tok == "+1") {
        steps.push_back(1);
      } else if (tok == "-" || tok == "-1") {
        steps.push_back(-1);
      } else {
        throw std::invalid_argument("arrow table line " + std::to_string(lineno) +
                                    ": bad step token '" + tok + "'");
      }
    }
    if (!table.emplace(site, std::move(steps)).second) {
      throw std::invalid_argument("arrow table line " + std::to_string(lineno) +
                                  ": duplicate site " + std::to_string(site));
    }
  }
  return FixtureArrowSystem(std::move(table));
}

std::string format_arrow_table(const FixtureArrowSystem& fixture) {
  std::ostringstream out;
  for (const auto& [site, steps] : fixture.table()) {
    out << site << ":";
    for (Step s : steps) out << ' ' << (s > 0 ? '+' : '-');
    out << '\n';
  }
  return out.str();
}

WalkPath walk_from_arrows(ArrowSystem& system, int64_t n) {
  if (n < 0) throw std::invalid_argument("walk_from_arrows: n must be >= 0");
  WalkPath path;
  path.positions.reserve(static_cast<size_t>(n) + 1);
  int64_t pos = 0;
  path.positions.push_back(pos);
  TwoSided<int64_t> departures;
  for (int64_t m = 0; m < n; ++m) {
    const int64_t k = ++departures.at(pos);
    pos += system.take(pos, k);
    path.positions.push_back(pos);
  }
  return path;
}

bool prefix_dominates(const ArrowSystem& l, const ArrowSystem& r,
                      SiteWindow sites, int64_t depth) {
  if (sites.lo > sites.hi || depth < 1) {
    throw std::invalid_argument("prefix_dominates: empty window");
  }
  for (int64_t x = sites.lo; x <= sites.hi; ++x) {
    int64_t sum_l = 0, sum_r = 0;
    for (int64_t k = 1; k <= depth; ++k) {
      const auto sl = l.peek(x, k);
      const auto sr = r.peek(x, k);
      if (!sl || !sr) {
        throw std::out_of_range(
            "prefix_dominates: window reaches unmaterialized cell (" +
            std::to_string(x) + ", " + std::to_string(k) + ")");
      }
      sum_l += *sl;
      sum_r += *sr;
      if (sum_l > sum_r) return false;
    }
  }
  return true;
}

}  // namespace erw
