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

#include "erw/regen.hpp"

#include <algorithm>
#include <cmath>

#include "erw/parallel.hpp"

namespace erw {

namespace {

uint64_t bootstrap_seed(uint64_t seed, uint64_t salt) {
  return splitmix64(seed ^ (0xB007'5EED'0000'0000ULL + salt));
}

bool strictly_positive_excursion(const WalkPath& path, int64_t guard) {
  int64_t maxpos = 0;
  for (size_t m = 1; m < path.positions.size(); ++m) {
    if (path.positions[m] <= 0) return false;
    maxpos = std::max(maxpos, path.positions[m]);
  }
  return maxpos >= guard;  // censored the same way as zero_is_regen
}

}  // namespace

RegenerationReport find_regenerations(const WalkPath& path, int64_t guard) {
  if (guard < 1) throw std::invalid_argument("find_regenerations: guard must be >= 1");
  RegenerationReport report;
  report.censor = {path.horizon(), guard, 0};
  const auto& pos = path.positions;
  if (pos.empty()) return report;

  int64_t maxpos = 0;
  for (int64_t x : pos) maxpos = std::max(maxpos, x);

  // First hits of non-negative levels.
  std::vector<int64_t> first_hit(static_cast<size_t>(maxpos) + 1, -1);
  for (size_t m = 0; m < pos.size(); ++m) {
    const int64_t x = pos[m];
    if (x >= 0 && first_hit[static_cast<size_t>(x)] < 0) {
      first_hit[static_cast<size_t>(x)] = static_cast<int64_t>(m);
    }
  }

  // Minimum of the path from time m onwards.
  std::vector<int64_t> suffix_min(pos.size());
  int64_t cur = pos.back();
  for (size_t m = pos.size(); m-- > 0;) {
    cur = std::min(cur, pos[m]);
    suffix_min[m] = cur;
  }

  for (int64_t x = 0; x <= maxpos; ++x) {
    const int64_t t = first_hit[static_cast<size_t>(x)];
    if (t < 0) continue;                                  // never hit
    if (suffix_min[static_cast<size_t>(t)] < x) continue; // went below after first hit
    if (x + guard > maxpos) continue;                     // censored
    report.levels.push_back(x);
    report.level_hit_times.push_back(t);
  }
  report.zero_is_regen =
      !report.levels.empty() && report.levels.front() == 0;

  for (size_t i = 0; i + 1 < report.levels.size(); ++i) {
    report.blocks.push_back(
        {report.levels[i + 1] - report.levels[i],
         report.level_hit_times[i + 1] - report.level_hit_times[i]});
  }

  if (report.levels.empty()) {
    report.censor.discarded_edge_blocks = path.horizon() > 0 ? 1 : 0;
  } else {
    if (report.level_hit_times.front() > 0) ++report.censor.discarded_edge_blocks;
    if (report.level_hit_times.back() < path.horizon()) ++report.censor.discarded_edge_blocks;
  }
  return report;
}

MutualCheckResult mutual_regeneration_check(const CoupledSample& sample,
                                            int64_t guard) {
  // Membership of L's levels is tested on R over time-matched windows: for a
  // level x with first hits t_L, t_R, the R walk must stay at or above x
  // during [t_R, t_R + (n - t_L)].  That window is the finite-horizon
  // statement the coupling proves; over the full horizon R's clock at x runs
  // ahead of L's and a later dip would say nothing about the ordering.
  MutualCheckResult res;
  const RegenerationReport rl = find_regenerations(sample.l_path, guard);
  res.zero_in_l = rl.zero_is_regen;

  const auto& r = sample.r_path.positions;
  const int64_t n = sample.r_path.horizon();
  int64_t max_r = 0;
  for (int64_t x : r) max_r = std::max(max_r, x);
  std::vector<int64_t> first_hit_r(static_cast<size_t>(max_r) + 1, -1);
  for (size_t m = 0; m < r.size(); ++m) {
    if (r[m] >= 0 && first_hit_r[static_cast<size_t>(r[m])] < 0) {
      first_hit_r[static_cast<size_t>(r[m])] = static_cast<int64_t>(m);
    }
  }
  // First time R steps below level x after being at x (one pass: every down
  // step from x >= 0 closes level x if still open).
  std::vector<int64_t> first_below_r(static_cast<size_t>(max_r) + 1, -1);
  for (size_t m = 1; m < r.size(); ++m) {
    if (r[m] < r[m - 1] && r[m - 1] >= 0 && r[m - 1] <= max_r) {
      int64_t& slot = first_below_r[static_cast<size_t>(r[m - 1])];
      if (slot < 0) slot = static_cast<int64_t>(m);
    }
  }
  res.zero_in_r = first_below_r.empty()
                      ? false
                      : (first_below_r[0] < 0 && max_r >= guard);
  if (res.zero_in_l && !res.zero_in_r) ++res.indicator_violations;

  std::vector<int64_t> r_level_hits;
  std::vector<int64_t> l_level_hits;
  for (size_t i = 0; i < rl.levels.size(); ++i) {
    const int64_t x = rl.levels[i];
    const int64_t t_l = rl.level_hit_times[i];
    if (x > max_r || first_hit_r[static_cast<size_t>(x)] < 0) {
      ++res.inclusion_violations;  // R never reached the level at all
      continue;
    }
    const int64_t t_r = first_hit_r[static_cast<size_t>(x)];
    const int64_t window_end = t_r + (n - t_l);
    const int64_t dip = first_below_r[static_cast<size_t>(x)];
    if (dip >= 0 && dip <= window_end) {
      ++res.inclusion_violations;
      continue;
    }
    res.mutual_levels.push_back(x);
    l_level_hits.push_back(t_l);
    r_level_hits.push_back(t_r);
  }

  for (size_t i = 0; i + 1 < res.mutual_levels.size(); ++i) {
    const int64_t disp = res.mutual_levels[i + 1] - res.mutual_levels[i];
    const int64_t dur_l = l_level_hits[i + 1] - l_level_hits[i];
    const int64_t dur_r = r_level_hits[i + 1] - r_level_hits[i];
    if (dur_r > dur_l) ++res.duration_violations;
    res.block_disp.push_back(disp);
    res.block_dur_l.push_back(dur_l);
    res.block_dur_r.push_back(dur_r);
  }
  return res;
}

namespace {

struct GuardAccumulator {
  double disp = 0.0;
  double dur = 0.0;
  int64_t blocks = 0;
};

std::vector<int64_t> guards_to_scan(int64_t guard) {
  std::vector<int64_t> guards{guard};
  for (int64_t g : kSensitivityGuards) {
    if (g != guard) guards.push_back(g);
  }
  return guards;
}

}  // namespace

SpeedReport speed_regeneration(const CookieEnvironment& env, uint64_t seed,
                               int64_t replicas, int64_t horizon,
                               int64_t guard) {
  if (replicas < 1 || horizon < 1) {
    throw std::invalid_argument("speed_regeneration: positive replicas and horizon required");
  }
  const std::vector<int64_t> guards = guards_to_scan(guard);
  // per guard, per replica cluster sums
  std::vector<std::vector<GuardAccumulator>> acc(
      guards.size(), std::vector<GuardAccumulator>(static_cast<size_t>(replicas)));

  parallel_replicas(replicas, [&](int64_t r) {
    const WalkPath path = simulate_erw(env, SeedKey{seed, static_cast<uint64_t>(r)}, horizon);
    for (size_t g = 0; g < guards.size(); ++g) {
      const RegenerationReport rep = find_regenerations(path, guards[g]);
      GuardAccumulator& a = acc[g][static_cast<size_t>(r)];
      for (const RegenBlock& b : rep.blocks) {
        a.disp += static_cast<double>(b.displacement);
        a.dur += static_cast<double>(b.duration);
        ++a.blocks;
      }
    }
  });

  SpeedReport report;
  const bool caveat =
      classify(env).classification != Classification::kTransientPositiveSpeed;
  for (size_t g = 0; g < guards.size(); ++g) {
    std::vector<double> num(static_cast<size_t>(replicas));
    std::vector<double> den(static_cast<size_t>(replicas));
    int64_t blocks = 0;
    KahanSum total_num, total_den;
    for (int64_t r = 0; r < replicas; ++r) {
      const GuardAccumulator& a = acc[g][static_cast<size_t>(r)];
      num[static_cast<size_t>(r)] = a.disp;
      den[static_cast<size_t>(r)] = a.dur;
      total_num.add(a.disp);
      total_den.add(a.dur);
      blocks += a.blocks;
    }
    if (g == 0) {
      if (blocks < kMinInteriorBlocks) {
        throw InsufficientRegenerations(
            "insufficient regenerations: " + std::to_string(blocks) +
            " interior blocks at guard " + std::to_string(guards[g]) +
            " (need " + std::to_string(kMinInteriorBlocks) + ")");
      }
      const BootstrapCis cis = bootstrap_ratio_ci(num, den, kBootstrapResamples,
                                                  bootstrap_seed(seed, 1));
      report.estimate.value = total_num.value() / total_den.value();
      report.estimate.ci95 = cis.ci95;
      report.estimate.ci99 = cis.ci99;
      report.estimate.method = "regeneration-ratio";
      report.estimate.block_count = blocks;
      report.estimate.replica_count = replicas;
      report.estimate.zero_speed_caveat = caveat;
    }
    GuardSensitivityRow row;
    row.guard = guards[g];
    row.block_count = blocks;
    if (blocks >= kMinInteriorBlocks && total_den.value() > 0.0) {
      row.value = total_num.value() / total_den.value();
      row.ci95 = bootstrap_ratio_ci(num, den, kBootstrapResamples,
                                    bootstrap_seed(seed, 100 + g))
                     .ci95;
    }
    report.sensitivity.push_back(row);
  }
  std::sort(report.sensitivity.begin(), report.sensitivity.end(),
            [](const auto& a, const auto& b) { return a.guard < b.guard; });
  return report;
}

PairedSpeedReport coupled_speed_pair(const CouplingKernel& kernel,
                                     uint64_t seed, int64_t replicas,
                                     int64_t horizon, int64_t guard) {
  if (replicas < 1 || horizon < 1) {
    throw std::invalid_argument("coupled_speed_pair: positive replicas and horizon required");
  }
  const std::vector<int64_t> guards = guards_to_scan(guard);
  struct PairAcc {
    double disp = 0.0;
    double dur_l = 0.0;
    double dur_r = 0.0;
    int64_t blocks = 0;
    int64_t duration_violations = 0;
    int64_t inclusion_violations = 0;
  };
  std::vector<std::vector<PairAcc>> acc(
      guards.size(), std::vector<PairAcc>(static_cast<size_t>(replicas)));

  parallel_replicas(replicas, [&](int64_t r) {
    const CoupledSample sample = simulate_coupled(
        kernel, SeedKey{seed, static_cast<uint64_t>(r)}, horizon);
    for (size_t g = 0; g < guards.size(); ++g) {
      const MutualCheckResult mc = mutual_regeneration_check(sample, guards[g]);
      PairAcc& a = acc[g][static_cast<size_t>(r)];
      a.duration_violations = mc.duration_violations;
      a.inclusion_violations = mc.inclusion_violations;
      for (size_t b = 0; b < mc.block_disp.size(); ++b) {
        a.disp += static_cast<double>(mc.block_disp[b]);
        a.dur_l += static_cast<double>(mc.block_dur_l[b]);
        a.dur_r += static_cast<double>(mc.block_dur_r[b]);
        ++a.blocks;
      }
    }
  });

  PairedSpeedReport report;
  const bool caveat_p = classify(kernel.p_env()).classification !=
                        Classification::kTransientPositiveSpeed;
  const bool caveat_q = classify(kernel.q_env()).classification !=
                        Classification::kTransientPositiveSpeed;
  for (size_t g = 0; g < guards.size(); ++g) {
    std::vector<double> disp(static_cast<size_t>(replicas));
    std::vector<double> dur_l(static_cast<size_t>(replicas));
    std::vector<double> dur_r(static_cast<size_t>(replicas));
    int64_t blocks = 0;
    int64_t dur_viol = 0, inc_viol = 0;
    KahanSum sx, sl, sr;
    for (int64_t r = 0; r < replicas; ++r) {
      const PairAcc& a = acc[g][static_cast<size_t>(r)];
      disp[static_cast<size_t>(r)] = a.disp;
      dur_l[static_cast<size_t>(r)] = a.dur_l;
      dur_r[static_cast<size_t>(r)] = a.dur_r;
      sx.add(a.disp);
      sl.add(a.dur_l);
      sr.add(a.dur_r);
      blocks += a.blocks;
      dur_viol += a.duration_violations;
      inc_viol += a.inclusion_violations;
    }
    if (g == 0) {
      if (blocks < kMinInteriorBlocks) {
        throw InsufficientRegenerations(
            "insufficient regenerations: " + std::to_string(blocks) +
            " mutual interior blocks at guard " + std::to_string(guards[g]));
      }
      report.duration_violations = dur_viol;
      report.inclusion_violations = inc_viol;

      const BootstrapCis ci_p = bootstrap_ratio_ci(disp, dur_l, kBootstrapResamples,
                                                   bootstrap_seed(seed, 2));
      const BootstrapCis ci_q = bootstrap_ratio_ci(disp, dur_r, kBootstrapResamples,
                                                   bootstrap_seed(seed, 3));
      const BootstrapCis ci_d = bootstrap_paired_diff_ci(
          disp, dur_l, dur_r, kBootstrapResamples, bootstrap_seed(seed, 4));

      report.p_speed = {sx.value() / sl.value(), ci_p.ci95,     ci_p.ci99,
                        "regeneration-ratio",    blocks,        replicas,
                        caveat_p};
      report.q_speed = {sx.value() / sr.value(), ci_q.ci95,     ci_q.ci99,
                        "regeneration-ratio",    blocks,        replicas,
                        caveat_q};
      report.paired_diff = {report.q_speed.value - report.p_speed.value,
                            ci_d.ci95,
                            ci_d.ci99,
                            "regeneration-ratio",
                            blocks,
                            replicas,
                            caveat_p};
    }
    GuardSensitivityRow row;
    row.guard = guards[g];
    row.block_count = blocks;
    if (blocks >= kMinInteriorBlocks && sl.value() > 0.0 && sr.value() > 0.0) {
      row.value = sx.value() / sr.value() - sx.value() / sl.value();
      row.ci95 = bootstrap_paired_diff_ci(disp, dur_l, dur_r, kBootstrapResamples,
                                          bootstrap_seed(seed, 200 + g))
                     .ci95;
    }
    report.diff_sensitivity.push_back(row);
  }
  std::sort(report.diff_sensitivity.begin(), report.diff_sensitivity.end(),
            [](const auto& a, const auto& b) { return a.guard < b.guard; });
  return report;
}

RegenProbabilityReport regen_probability(const CookieEnvironment& env,
                                         uint64_t seed, int64_t replicas,
                                         int64_t horizon, int64_t guard) {
  if (replicas < 1) throw std::invalid_argument("regen_probability: replicas must be >= 1");
  std::vector<uint8_t> zero_regen(static_cast<size_t>(replicas));
  std::vector<uint8_t> strict_pos(static_cast<size_t>(replicas));
  parallel_replicas(replicas, [&](int64_t r) {
    const WalkPath path = simulate_erw(env, SeedKey{seed, static_cast<uint64_t>(r)}, horizon);
    zero_regen[static_cast<size_t>(r)] =
        find_regenerations(path, guard).zero_is_regen ? 1 : 0;
    strict_pos[static_cast<size_t>(r)] =
        strictly_positive_excursion(path, guard) ? 1 : 0;
  });
  RegenProbabilityReport rep;
  rep.replicas = replicas;
  int64_t hits = 0, strict = 0;
  for (int64_t r = 0; r < replicas; ++r) {
    hits += zero_regen[static_cast<size_t>(r)];
    strict += strict_pos[static_cast<size_t>(r)];
  }
  rep.eps_p = static_cast<double>(hits) / static_cast<double>(replicas);
  const double se = binomial_se(rep.eps_p, replicas);
  rep.eps_p_ci95 = {rep.eps_p - kZ95 * se, rep.eps_p + kZ95 * se};
  rep.eps_p_ci99 = {rep.eps_p - kZ99 * se, rep.eps_p + kZ99 * se};
  rep.strict_positive_p = static_cast<double>(strict) / static_cast<double>(replicas);
  return rep;
}

RegenProbabilityReport regen_probability(const CouplingKernel& kernel,
                                         uint64_t seed, int64_t replicas,
                                         int64_t horizon, int64_t guard) {
  if (replicas < 1) throw std::invalid_argument("regen_probability: replicas must be >= 1");
  std::vector<int8_t> d(static_cast<size_t>(replicas));  // zR - zL per replica
  std::vector<uint8_t> zl(static_cast<size_t>(replicas));
  std::vector<uint8_t> zr(static_cast<size_t>(replicas));
  std::vector<uint8_t> sl(static_cast<size_t>(replicas));
  std::vector<uint8_t> sr(static_cast<size_t>(replicas));
  parallel_replicas(replicas, [&](int64_t r) {
    const CoupledSample sample = simulate_coupled(
        kernel, SeedKey{seed, static_cast<uint64_t>(r)}, horizon);
    const bool l = find_regenerations(sample.l_path, guard).zero_is_regen;
    const bool rr = find_regenerations(sample.r_path, guard).zero_is_regen;
    zl[static_cast<size_t>(r)] = l ? 1 : 0;
    zr[static_cast<size_t>(r)] = rr ? 1 : 0;
    d[static_cast<size_t>(r)] = static_cast<int8_t>((rr ? 1 : 0) - (l ? 1 : 0));
    sl[static_cast<size_t>(r)] = strictly_positive_excursion(sample.l_path, guard) ? 1 : 0;
    sr[static_cast<size_t>(r)] = strictly_positive_excursion(sample.r_path, guard) ? 1 : 0;
  });

  RegenProbabilityReport rep;
  rep.replicas = replicas;
  int64_t hl = 0, hr = 0, strict_l = 0, strict_r = 0;
  for (int64_t r = 0; r < replicas; ++r) {
    hl += zl[static_cast<size_t>(r)];
    hr += zr[static_cast<size_t>(r)];
    strict_l += sl[static_cast<size_t>(r)];
    strict_r += sr[static_cast<size_t>(r)];
    if (d[static_cast<size_t>(r)] < 0) ++rep.indicator_violations;
  }
  rep.eps_p = static_cast<double>(hl) / static_cast<double>(replicas);
  rep.eps_q = static_cast<double>(hr) / static_cast<double>(replicas);
  const double se_p = binomial_se(rep.eps_p, replicas);
  rep.eps_p_ci95 = {rep.eps_p - kZ95 * se_p, rep.eps_p + kZ95 * se_p};
  rep.eps_p_ci99 = {rep.eps_p - kZ99 * se_p, rep.eps_p + kZ99 * se_p};
  const double se_q = binomial_se(*rep.eps_q, replicas);
  rep.eps_q_ci95 = {*rep.eps_q - kZ95 * se_q, *rep.eps_q + kZ95 * se_q};

  // Paired difference of the indicators.
  std::vector<double> dd(static_cast<size_t>(replicas));
  for (int64_t r = 0; r < replicas; ++r) dd[static_cast<size_t>(r)] = d[static_cast<size_t>(r)];
  const MeanVar mv = mean_and_sd(dd);
  rep.diff = mv.mean;
  rep.diff_ci95 = mean_ci(mv.mean, mv.sd, mv.n, kZ95);
  rep.diff_ci99 = mean_ci(mv.mean, mv.sd, mv.n, kZ99);
  rep.strict_positive_p = static_cast<double>(strict_l) / static_cast<double>(replicas);
  rep.strict_positive_q = static_cast<double>(strict_r) / static_cast<double>(replicas);
  return rep;
}

WitnessReport witness_event_frequency(const CouplingKernel& kernel,
                                      uint64_t seed, int64_t replicas,
                                      int64_t horizon, int64_t guard) {
  const int m0 = compute_m0(kernel);  // throws for the identity
  if (replicas < 1 || horizon < 2 * (m0 + 1) + 2) {
    throw std::invalid_argument("witness_event_frequency: horizon too short for m0");
  }
  std::vector<uint8_t> witness(static_cast<size_t>(replicas), 0);
  std::vector<uint8_t> violation(static_cast<size_t>(replicas), 0);

  parallel_replicas(replicas, [&](int64_t r) {
    const SeedKey key{seed, static_cast<uint64_t>(r)};
    auto source = std::make_shared<CoupledArrowSource>(kernel, key);
    // Conditions (local cookie pattern) first; they are cheap and decide
    // most replicas without simulating the walks.
    const SitePairSample& site0 = source->ensure(0, m0 + 1);
    for (int k = 1; k <= m0 + 1; ++k) {
      if (site0.y[static_cast<size_t>(k - 1)] != 1 ||
          site0.z[static_cast<size_t>(k - 1)] != 1) {
        return;
      }
    }
    const SitePairSample& site1 = source->ensure(1, m0);
    for (int k = 1; k <= m0; ++k) {
      if (site1.y[static_cast<size_t>(k - 1)] != 0) return;
    }
    if (site1.z[static_cast<size_t>(m0 - 1)] != 1) return;

    KernelArrowSystem l_system(source, WalkLane::kLeft);
    KernelArrowSystem r_system(source, WalkLane::kRight);
    const WalkPath l_path = walk_from_arrows(l_system, horizon);
    const WalkPath r_path = walk_from_arrows(r_system, horizon);
    const RegenerationReport rl = find_regenerations(l_path, guard);
    const RegenerationReport rr = find_regenerations(r_path, guard);
    const bool two_in_l =
        std::binary_search(rl.levels.begin(), rl.levels.end(), int64_t{2});
    const bool two_in_r =
        std::binary_search(rr.levels.begin(), rr.levels.end(), int64_t{2});
    if (!two_in_l || !two_in_r) return;
    witness[static_cast<size_t>(r)] = 1;

    // On the witness event level 2 is L's first positive regeneration level
    // and L must reach it strictly later than R.
    int64_t first_positive = -1;
    for (int64_t x : rl.levels) {
      if (x > 0) {
        first_positive = x;
        break;
      }
    }
    const auto tl = hitting_time(l_path, 2);
    const auto tr = hitting_time(r_path, 2);
    if (first_positive != 2 || !tl || !tr || !(*tl > *tr)) {
      violation[static_cast<size_t>(r)] = 1;
    }
  });

  WitnessReport rep;
  rep.m0 = m0;
  rep.replicas = replicas;
  for (int64_t r = 0; r < replicas; ++r) {
    rep.witness_count += witness[static_cast<size_t>(r)];
    rep.conditional_violations += violation[static_cast<size_t>(r)];
  }
  rep.frequency =
      static_cast<double>(rep.witness_count) / static_cast<double>(replicas);
  return rep;
}

SpeedEstimate naive_speed(const CookieEnvironment& env, uint64_t seed,
                          int64_t replicas, int64_t horizon) {
  if (replicas < 1 || horizon < 1) {
    throw std::invalid_argument("naive_speed: positive replicas and horizon required");
  }
  std::vector<double> ratios(static_cast<size_t>(replicas));
  parallel_replicas(replicas, [&](int64_t r) {
    const WalkPath path = simulate_erw(env, SeedKey{seed, static_cast<uint64_t>(r)}, horizon);
    ratios[static_cast<size_t>(r)] =
        static_cast<double>(path.positions.back()) / static_cast<double>(horizon);
  });
  const MeanVar mv = mean_and_sd(ratios);
  SpeedEstimate est;
  est.value = mv.mean;
  est.ci95 = mean_ci(mv.mean, mv.sd, mv.n, kZ95);
  est.ci99 = mean_ci(mv.mean, mv.sd, mv.n, kZ99);
  est.method = "naive";
  est.replica_count = replicas;
  est.zero_speed_caveat =
      classify(env).classification != Classification::kTransientPositiveSpeed;
  return est;
}

}  // namespace erw
