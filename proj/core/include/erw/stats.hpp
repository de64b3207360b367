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
#include <vector>

namespace erw {

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;

class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool excludes_zero() const { return lo > 0.0 || hi < 0.0; }
};

double binomial_se(double phat, int64_t n);

// Normal-approximation interval for a sample mean.
ConfidenceInterval mean_ci(double mean, double sd, int64_t n, double z);

struct MeanVar {
  double mean = 0.0;
  double sd = 0.0;
  int64_t n = 0;
};
MeanVar mean_and_sd(const std::vector<double>& xs);

struct BootstrapCis {
  ConfidenceInterval ci95;
  ConfidenceInterval ci99;
};

// Percentile bootstrap (B resamples) of sum(num)/sum(den) over clusters.
BootstrapCis bootstrap_ratio_ci(const std::vector<double>& num,
                                const std::vector<double>& den, int resamples,
                                uint64_t seed);

// Percentile bootstrap of sum(disp)/sum(dur_r) - sum(disp)/sum(dur_l) over
// paired clusters.
BootstrapCis bootstrap_paired_diff_ci(const std::vector<double>& disp,
                                      const std::vector<double>& dur_l,
                                      const std::vector<double>& dur_r,
                                      int resamples, uint64_t seed);

// Goodness of fit of observed counts against a fixed distribution; categories
// with expected count below min_expected are pooled into one bin.
double chi_square_gof_pvalue(const std::vector<int64_t>& observed,
                             const std::vector<double>& expected_probs,
                             double min_expected = 5.0);

// Homogeneity test of two independent count vectors over shared categories.
double chi_square_two_sample_pvalue(const std::vector<int64_t>& a,
                                    const std::vector<int64_t>& b,
                                    double min_expected = 5.0);

}  // namespace erw
