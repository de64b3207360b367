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

#include "erw/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "erw/stats.hpp"
#include "kernel_units.hpp"

namespace erw {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr int kRationalHorizonLimit = 10;

// DFS over all 2^n nearest-neighbour paths, multiplying cookie probabilities
// along the way.  Scalar is Rational for exact small-horizon laws.
template <typename Scalar>
void enumerate_paths(const CookieEnvironment& env, int n,
                     const std::function<void(uint32_t, const Scalar&)>& cb) {
  std::vector<int64_t> departures(static_cast<size_t>(2 * n + 1), 0);
  std::function<void(int, int64_t, uint32_t, const Scalar&)> rec =
      [&](int m, int64_t pos, uint32_t mask, const Scalar& prob) {
        if (m == n) {
          cb(mask, prob);
          return;
        }
        int64_t& count = departures[static_cast<size_t>(pos + n)];
        const int64_t k = ++count;
        const Scalar pk(env.cookie_prob(k));
        rec(m + 1, pos + 1, mask | (1u << m), prob * pk);
        rec(m + 1, pos - 1, mask, prob * (Scalar(1) - pk));
        --count;
      };
  rec(0, 0, 0, Scalar(1));
}

}  // namespace

ExactPathDistribution exact_path_distribution(const CookieEnvironment& env,
                                              int n) {
  if (n < 1 || n > kMaxExactPathHorizon) {
    throw std::invalid_argument("exact_path_distribution: horizon must lie in [1, " +
                                std::to_string(kMaxExactPathHorizon) + "]");
  }
  ExactPathDistribution dist;
  dist.horizon = n;
  dist.prob.assign(size_t{1} << n, 0.0);
  if (n <= kRationalHorizonLimit) {
    enumerate_paths<Rational>(env, n, [&](uint32_t mask, const Rational& p) {
      dist.prob[mask] = p.convert_to<double>();
    });
  } else {
    enumerate_paths<double>(env, n, [&](uint32_t mask, const double& p) {
      dist.prob[mask] = p;
    });
  }
  return dist;
}

WalkPath decode_path(uint32_t mask, int horizon) {
  WalkPath path;
  path.positions.reserve(static_cast<size_t>(horizon) + 1);
  int64_t pos = 0;
  path.positions.push_back(pos);
  for (int m = 0; m < horizon; ++m) {
    pos += ((mask >> m) & 1u) ? 1 : -1;
    path.positions.push_back(pos);
  }
  return path;
}

double total_mass(const ExactPathDistribution& dist) {
  KahanSum sum;
  for (double p : dist.prob) sum.add(p);
  return sum.value();
}

double terminal_value_probability(const ExactPathDistribution& dist,
                                  int64_t value) {
  KahanSum sum;
  for (uint32_t mask = 0; mask < dist.prob.size(); ++mask) {
    const int64_t ups = __builtin_popcount(mask);
    if (2 * ups - dist.horizon == value) sum.add(dist.prob[mask]);
  }
  return sum.value();
}

double hit_level_by_time_probability(const ExactPathDistribution& dist,
                                     int64_t level, int64_t time) {
  if (level == 0) return 1.0;  // X_0 = 0
  KahanSum sum;
  for (uint32_t mask = 0; mask < dist.prob.size(); ++mask) {
    if (dist.prob[mask] == 0.0) continue;
    int64_t pos = 0;
    for (int m = 0; m < dist.horizon && m < time; ++m) {
      pos += ((mask >> m) & 1u) ? 1 : -1;
      if (pos == level) {
        sum.add(dist.prob[mask]);
        break;
      }
    }
  }
  return sum.value();
}

double running_max_at_least_probability(const ExactPathDistribution& dist,
                                        int64_t level) {
  KahanSum sum;
  for (uint32_t mask = 0; mask < dist.prob.size(); ++mask) {
    int64_t pos = 0, maxpos = 0;
    for (int m = 0; m < dist.horizon; ++m) {
      pos += ((mask >> m) & 1u) ? 1 : -1;
      maxpos = std::max(maxpos, pos);
    }
    if (maxpos >= level) sum.add(dist.prob[mask]);
  }
  return sum.value();
}

double running_min_at_most_probability(const ExactPathDistribution& dist,
                                       int64_t level) {
  KahanSum sum;
  for (uint32_t mask = 0; mask < dist.prob.size(); ++mask) {
    int64_t pos = 0, minpos = 0;
    for (int m = 0; m < dist.horizon; ++m) {
      pos += ((mask >> m) & 1u) ? 1 : -1;
      minpos = std::min(minpos, pos);
    }
    if (minpos <= level) sum.add(dist.prob[mask]);
  }
  return sum.value();
}

namespace {

// Exact enumeration of the coupled pair law.  Cookie indices per site split
// into independent units (kernel_units); the recursion branches on the bit a
// walk actually consumes, narrowing the unit's compatible atom set.  A leaf's
// probability is the product over touched units of the compatible mass.
class CoupledEnumerator {
 public:
  CoupledEnumerator(const CouplingKernel& kernel, int n)
      : kernel_(kernel), n_(n) {
    const int64_t closed = closed_depth(kernel, n);
    units_ = detail::kernel_units<Rational>(kernel, closed);
    unit_of_index_.assign(static_cast<size_t>(closed) + 1, -1);
    for (size_t u = 0; u < units_.size(); ++u) {
      for (int64_t k : units_[u].indices) {
        unit_of_index_[static_cast<size_t>(k)] = static_cast<int>(u);
      }
      if (units_[u].atoms.size() > 32) {
        throw std::invalid_argument(
            "exact_coupled_distribution: kernel unit too rich to enumerate");
      }
    }
  }

  std::map<std::pair<uint32_t, uint32_t>, Rational> run() {
    l_departures_.assign(static_cast<size_t>(2 * n_ + 1), 0);
    r_departures_.assign(static_cast<size_t>(2 * n_ + 1), 0);
    run_left(0, 0, 0);
    return out_;
  }

 private:
  struct SiteUnitState {
    uint32_t compatible = 0;  // bitmask over the unit's atoms
    bool touched = false;
  };

  // (site, unit) -> constraint state; the map doubles as the touched-set.
  using StateKey = std::pair<int64_t, int>;

  uint32_t full_mask(int unit) const {
    const size_t n_atoms = units_[static_cast<size_t>(unit)].atoms.size();
    return n_atoms >= 32 ? ~0u : ((1u << n_atoms) - 1u);
  }

  Rational mass(int unit, uint32_t subset) const {
    Rational m(0);
    const auto& atoms = units_[static_cast<size_t>(unit)].atoms;
    for (size_t a = 0; a < atoms.size(); ++a) {
      if ((subset >> a) & 1u) m += atoms[a].prob;
    }
    return m;
  }

  // Splits the compatible set of (site, unit) on the value of one bit; calls
  // cont(value) with the constraint applied, restoring afterwards.
  template <typename Cont>
  void branch_bit(int64_t site, int64_t index, bool right_lane,
                  const Cont& cont) {
    const int unit = unit_of_index_[static_cast<size_t>(index)];
    const auto& u = units_[static_cast<size_t>(unit)];
    int bit = -1;
    for (size_t t = 0; t < u.indices.size(); ++t) {
      if (u.indices[t] == index) bit = static_cast<int>(t);
    }
    const StateKey key{site, unit};
    auto [it, inserted] = states_.try_emplace(key, SiteUnitState{full_mask(unit), true});
    const uint32_t before = it->second.compatible;
    uint32_t with0 = 0, with1 = 0;
    for (size_t a = 0; a < u.atoms.size(); ++a) {
      if (!((before >> a) & 1u)) continue;
      const uint32_t bits = right_lane ? u.atoms[a].z : u.atoms[a].y;
      if ((bits >> bit) & 1u) {
        with1 |= 1u << a;
      } else {
        with0 |= 1u << a;
      }
    }
    if (with1 != 0) {
      it->second.compatible = with1;
      cont(true);
    }
    if (with0 != 0) {
      it = states_.find(key);  // re-find: cont may rehash
      it->second.compatible = with0;
      cont(false);
    }
    it = states_.find(key);
    it->second.compatible = before;
    if (inserted) states_.erase(it);
  }

  void run_left(int m, int64_t pos, uint32_t mask) {
    if (m == n_) {
      run_right(0, 0, mask, 0);
      return;
    }
    int64_t& count = l_departures_[static_cast<size_t>(pos + n_)];
    const int64_t k = ++count;
    branch_bit(pos, k, /*right_lane=*/false, [&](bool right_step) {
      run_left(m + 1, pos + (right_step ? 1 : -1),
               right_step ? (mask | (1u << m)) : mask);
    });
    --count;
  }

  void run_right(int m, int64_t pos, uint32_t l_mask, uint32_t r_mask) {
    if (m == n_) {
      record(l_mask, r_mask);
      return;
    }
    int64_t& count = r_departures_[static_cast<size_t>(pos + n_)];
    const int64_t k = ++count;
    branch_bit(pos, k, /*right_lane=*/true, [&](bool right_step) {
      run_right(m + 1, pos + (right_step ? 1 : -1), l_mask,
                right_step ? (r_mask | (1u << m)) : r_mask);
    });
    --count;
  }

  void record(uint32_t l_mask, uint32_t r_mask) {
    Rational prob(1);
    for (const auto& [key, state] : states_) {
      prob *= mass(key.second, state.compatible);
    }
    out_[{l_mask, r_mask}] += prob;
  }

  const CouplingKernel& kernel_;
  int n_;
  std::vector<detail::KernelUnit<Rational>> units_;
  std::vector<int> unit_of_index_;
  std::map<StateKey, SiteUnitState> states_;
  std::vector<int64_t> l_departures_;
  std::vector<int64_t> r_departures_;
  std::map<std::pair<uint32_t, uint32_t>, Rational> out_;
};

}  // namespace

ExactCoupledDistribution exact_coupled_distribution(const CouplingKernel& kernel,
                                                    int n) {
  if (n < 1 || n > kMaxExactJointHorizon) {
    throw std::invalid_argument("exact_coupled_distribution: horizon must lie in [1, " +
                                std::to_string(kMaxExactJointHorizon) + "]");
  }
  CoupledEnumerator enumerator(kernel, n);
  const auto atoms = enumerator.run();
  ExactCoupledDistribution dist;
  dist.horizon = n;
  dist.atoms.reserve(atoms.size());
  for (const auto& [key, prob] : atoms) {
    dist.atoms.push_back({key.first, key.second, prob.convert_to<double>()});
  }
  return dist;
}

ExactPathDistribution marginal_l(const ExactCoupledDistribution& dist) {
  ExactPathDistribution out;
  out.horizon = dist.horizon;
  out.prob.assign(size_t{1} << dist.horizon, 0.0);
  std::vector<KahanSum> sums(out.prob.size());
  for (const auto& atom : dist.atoms) sums[atom.l_mask].add(atom.prob);
  for (size_t i = 0; i < sums.size(); ++i) out.prob[i] = sums[i].value();
  return out;
}

ExactPathDistribution marginal_r(const ExactCoupledDistribution& dist) {
  ExactPathDistribution out;
  out.horizon = dist.horizon;
  out.prob.assign(size_t{1} << dist.horizon, 0.0);
  std::vector<KahanSum> sums(out.prob.size());
  for (const auto& atom : dist.atoms) sums[atom.r_mask].add(atom.prob);
  for (size_t i = 0; i < sums.size(); ++i) out.prob[i] = sums[i].value();
  return out;
}

AtomCheckReport exact_order_check(const ExactCoupledDistribution& dist) {
  AtomCheckReport report;
  KahanSum bad_mass;
  for (const auto& atom : dist.atoms) {
    if (atom.prob <= 0.0) continue;
    ++report.atoms;
    const WalkPath l = decode_path(atom.l_mask, dist.horizon);
    const WalkPath r = decode_path(atom.r_mask, dist.horizon);
    bool ok = true;

    int64_t max_l = 0;
    for (int64_t x : l.positions) max_l = std::max(max_l, x);
    for (int64_t x = 1; x <= max_l && ok; ++x) {
      const auto tl = hitting_time(l, x);
      const auto tr = hitting_time(r, x);
      if (!tr || *tr > *tl) ok = false;
    }
    const auto lmax = running_max_series(l);
    const auto rmax = running_max_series(r);
    const auto lmin = running_min_series(l);
    const auto rmin = running_min_series(r);
    for (size_t m = 0; m < lmax.size() && ok; ++m) {
      if (lmax[m] > rmax[m] || lmin[m] > rmin[m]) ok = false;
    }
    if (!ok) {
      ++report.violating_atoms;
      bad_mass.add(atom.prob);
    }
  }
  report.violating_mass = bad_mass.value();
  return report;
}

namespace {

// Running-extrema histograms and hitting-time CDFs from the exact path law.
template <typename Scalar>
struct LawStats {
  std::vector<Scalar> max_ge;   // index x in 0..n: P(max >= x)
  std::vector<Scalar> min_le;   // index i encodes level -i, i in 0..n
  std::vector<std::vector<Scalar>> hit_cdf;  // [x][t]: P(T(x) <= t), x >= 1
};

template <typename Scalar>
LawStats<Scalar> law_stats(const CookieEnvironment& env, int n) {
  LawStats<Scalar> stats;
  stats.max_ge.assign(static_cast<size_t>(n) + 1, Scalar(0));
  stats.min_le.assign(static_cast<size_t>(n) + 1, Scalar(0));
  stats.hit_cdf.assign(static_cast<size_t>(n) + 1,
                       std::vector<Scalar>(static_cast<size_t>(n) + 1, Scalar(0)));
  enumerate_paths<Scalar>(env, n, [&](uint32_t mask, const Scalar& prob) {
    int64_t pos = 0, maxpos = 0, minpos = 0;
    std::vector<int> first_hit(static_cast<size_t>(n) + 1, -1);
    for (int m = 0; m < n; ++m) {
      pos += ((mask >> m) & 1u) ? 1 : -1;
      maxpos = std::max(maxpos, pos);
      minpos = std::min(minpos, pos);
      if (pos >= 1 && first_hit[static_cast<size_t>(pos)] < 0) {
        first_hit[static_cast<size_t>(pos)] = m + 1;
      }
    }
    for (int64_t x = 0; x <= maxpos; ++x) stats.max_ge[static_cast<size_t>(x)] += prob;
    for (int64_t x = 0; x >= minpos; --x) stats.min_le[static_cast<size_t>(-x)] += prob;
    for (int64_t x = 1; x <= n; ++x) {
      const int t = first_hit[static_cast<size_t>(x)];
      if (t < 0) continue;
      for (int tt = t; tt <= n; ++tt) {
        stats.hit_cdf[static_cast<size_t>(x)][static_cast<size_t>(tt)] += prob;
      }
    }
  });
  return stats;
}

inline double scalar_to_double(double v) { return v; }
inline double scalar_to_double(const Rational& v) {
  return v.convert_to<double>();
}

template <typename Scalar>
DominanceReport dominance_from_stats(const LawStats<Scalar>& sp,
                                     const LawStats<Scalar>& sq, int n,
                                     double tolerance) {
  DominanceReport report;
  auto push = [&](const std::string& name, int64_t threshold, int64_t time,
                  const Scalar& vp, const Scalar& vq, bool p_must_not_exceed_q) {
    DominanceRow row;
    row.statistic = name;
    row.threshold = threshold;
    row.time = time;
    row.value_p = scalar_to_double(vp);
    row.value_q = scalar_to_double(vq);
    const Scalar gap = p_must_not_exceed_q ? vq - vp : vp - vq;
    row.gap = scalar_to_double(gap);
    if (gap < Scalar(-tolerance)) {
      report.ok = false;
      report.worst_violation = std::max(report.worst_violation, -row.gap);
    }
    report.rows.push_back(row);
  };
  for (int64_t x = 1; x <= n; ++x) {
    push("max_ge", x, 0, sp.max_ge[static_cast<size_t>(x)],
         sq.max_ge[static_cast<size_t>(x)], true);
  }
  for (int64_t i = 1; i <= n; ++i) {
    // L's running min is stochastically lower: P_p(min <= -i) >= P_q(min <= -i)
    push("min_le", -i, 0, sp.min_le[static_cast<size_t>(i)],
         sq.min_le[static_cast<size_t>(i)], false);
  }
  for (int64_t x = 1; x <= n; ++x) {
    for (int64_t t = x; t <= n; ++t) {
      push("hit_cdf", x, t, sp.hit_cdf[static_cast<size_t>(x)][static_cast<size_t>(t)],
           sq.hit_cdf[static_cast<size_t>(x)][static_cast<size_t>(t)], true);
    }
  }
  return report;
}

}  // namespace

DominanceReport exact_dominance_check(const CookieEnvironment& p,
                                      const CookieEnvironment& q, int n) {
  if (n < 1 || n > kMaxExactDominanceHorizon) {
    throw std::invalid_argument("exact_dominance_check: horizon must lie in [1, " +
                                std::to_string(kMaxExactDominanceHorizon) + "]");
  }
  if (n <= kRationalHorizonLimit) {
    const auto sp = law_stats<Rational>(p, n);
    const auto sq = law_stats<Rational>(q, n);
    return dominance_from_stats<Rational>(sp, sq, n, 0.0);
  }
  const auto sp = law_stats<double>(p, n);
  const auto sq = law_stats<double>(q, n);
  return dominance_from_stats<double>(sp, sq, n, 1e-12);
}

}  // namespace erw
