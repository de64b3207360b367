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

#include "erw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "erw/prng.hpp"

namespace erw {

double binomial_se(double phat, int64_t n) {
  if (n <= 0) throw std::invalid_argument("binomial_se: n must be positive");
  return std::sqrt(phat * (1.0 - phat) / static_cast<double>(n));
}

ConfidenceInterval mean_ci(double mean, double sd, int64_t n, double z) {
  if (n <= 0) throw std::invalid_argument("mean_ci: n must be positive");
  const double half = z * sd / std::sqrt(static_cast<double>(n));
  return {mean - half, mean + half};
}

MeanVar mean_and_sd(const std::vector<double>& xs) {
  MeanVar mv;
  mv.n = static_cast<int64_t>(xs.size());
  if (mv.n == 0) return mv;
  KahanSum s;
  for (double x : xs) s.add(x);
  mv.mean = s.value() / static_cast<double>(mv.n);
  if (mv.n > 1) {
    KahanSum sq;
    for (double x : xs) sq.add((x - mv.mean) * (x - mv.mean));
    mv.sd = std::sqrt(sq.value() / static_cast<double>(mv.n - 1));
  }
  return mv;
}

namespace {

ConfidenceInterval percentile(std::vector<double>& sorted, double alpha) {
  const size_t b = sorted.size();
  auto pick = [&](double q) {
    const double pos = q * static_cast<double>(b - 1);
    const size_t i = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= b) return sorted[b - 1];
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
  };
  return {pick(alpha / 2.0), pick(1.0 - alpha / 2.0)};
}

BootstrapCis percentile_cis(std::vector<double>& stats) {
  std::sort(stats.begin(), stats.end());
  return {percentile(stats, 0.05), percentile(stats, 0.01)};
}

}  // namespace

BootstrapCis bootstrap_ratio_ci(const std::vector<double>& num,
                                const std::vector<double>& den, int resamples,
                                uint64_t seed) {
  if (num.size() != den.size() || num.empty()) {
    throw std::invalid_argument("bootstrap_ratio_ci: mismatched or empty clusters");
  }
  const size_t n = num.size();
  CounterRng rng(seed);
  std::vector<double> stats(static_cast<size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    KahanSum sn, sd;
    for (size_t i = 0; i < n; ++i) {
      const size_t j = static_cast<size_t>(rng.uniform_index(n));
      sn.add(num[j]);
      sd.add(den[j]);
    }
    stats[static_cast<size_t>(b)] = sd.value() > 0.0 ? sn.value() / sd.value() : 0.0;
  }
  return percentile_cis(stats);
}

BootstrapCis bootstrap_paired_diff_ci(const std::vector<double>& disp,
                                      const std::vector<double>& dur_l,
                                      const std::vector<double>& dur_r,
                                      int resamples, uint64_t seed) {
  if (disp.size() != dur_l.size() || disp.size() != dur_r.size() || disp.empty()) {
    throw std::invalid_argument("bootstrap_paired_diff_ci: mismatched or empty clusters");
  }
  const size_t n = disp.size();
  CounterRng rng(seed);
  std::vector<double> stats(static_cast<size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    KahanSum sx, sl, sr;
    for (size_t i = 0; i < n; ++i) {
      const size_t j = static_cast<size_t>(rng.uniform_index(n));
      sx.add(disp[j]);
      sl.add(dur_l[j]);
      sr.add(dur_r[j]);
    }
    const double vq = sr.value() > 0.0 ? sx.value() / sr.value() : 0.0;
    const double vp = sl.value() > 0.0 ? sx.value() / sl.value() : 0.0;
    stats[static_cast<size_t>(b)] = vq - vp;
  }
  return percentile_cis(stats);
}

namespace {

double chi_square_pvalue(double statistic, int64_t dof) {
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

double chi_square_gof_pvalue(const std::vector<int64_t>& observed,
                             const std::vector<double>& expected_probs,
                             double min_expected) {
  if (observed.size() != expected_probs.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof_pvalue: size mismatch");
  }
  int64_t n = 0;
  for (int64_t o : observed) n += o;
  if (n <= 0) throw std::invalid_argument("chi_square_gof_pvalue: no observations");

  // Pool thin categories so the chi-square approximation is usable.
  double stat = 0.0;
  int64_t bins = 0;
  double pooled_exp = 0.0;
  int64_t pooled_obs = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_probs[i] * static_cast<double>(n);
    if (e < min_expected) {
      pooled_exp += e;
      pooled_obs += observed[i];
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
    ++bins;
  }
  if (pooled_exp > 0.0) {
    const double d = static_cast<double>(pooled_obs) - pooled_exp;
    stat += d * d / pooled_exp;
    ++bins;
  }
  return chi_square_pvalue(stat, bins - 1);
}

double chi_square_two_sample_pvalue(const std::vector<int64_t>& a,
                                    const std::vector<int64_t>& b,
                                    double min_expected) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("chi_square_two_sample_pvalue: size mismatch");
  }
  int64_t na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
  }
  if (na <= 0 || nb <= 0) {
    throw std::invalid_argument("chi_square_two_sample_pvalue: empty sample");
  }
  const double total = static_cast<double>(na + nb);

  double stat = 0.0;
  int64_t bins = 0;
  double pa = 0.0, pb = 0.0;  // pooled thin categories
  int64_t oa = 0, ob = 0;
  auto add_cell = [&](double obs_a, double exp_a, double obs_b, double exp_b) {
    stat += (obs_a - exp_a) * (obs_a - exp_a) / exp_a;
    stat += (obs_b - exp_b) * (obs_b - exp_b) / exp_b;
    ++bins;
  };
  for (size_t i = 0; i < a.size(); ++i) {
    const double row = static_cast<double>(a[i] + b[i]);
    const double ea = row * static_cast<double>(na) / total;
    const double eb = row * static_cast<double>(nb) / total;
    if (ea < min_expected || eb < min_expected) {
      pa += ea;
      pb += eb;
      oa += a[i];
      ob += b[i];
      continue;
    }
    add_cell(static_cast<double>(a[i]), ea, static_cast<double>(b[i]), eb);
  }
  if (pa > 0.0 && pb > 0.0) {
    add_cell(static_cast<double>(oa), pa, static_cast<double>(ob), pb);
  }
  return chi_square_pvalue(stat, bins - 1);
}

}  // namespace erw
