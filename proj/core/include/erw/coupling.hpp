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
#include <utility>
#include <vector>

#include "erw/env.hpp"
#include "erw/prng.hpp"

namespace erw {

// A kernel couples two cookie sequences (Y, Z) per site so that Y has the
// p-environment's product-Bernoulli law, Z has the q-environment's, every
// realization satisfies prefix-sum domination sum(Y, 1..m) <= sum(Z, 1..m),
// and strict inequality happens with positive probability (except for the
// identity).  q is always derived from p and the construction.

struct KernelSpec {
  enum class Kind { kIdentity, kPointwise, kSwap, kCompose };

  Kind kind = Kind::kIdentity;
  std::vector<double> target;      // pointwise: target cookie prefix
  int swap_i = 0;                  // swap: 1-based cookie indices, i < j
  int swap_j = 0;
  std::vector<KernelSpec> stages;  // compose

  static KernelSpec identity();
  static KernelSpec pointwise(std::vector<double> target);
  static KernelSpec swap(int i, int j);
  static KernelSpec compose(std::vector<KernelSpec> stages);
};

struct ValidationReport {
  bool ok = true;
  std::string message;
};

// Structural preconditions of the construction against p_env; reports the
// first failing index or swap pair.
ValidationReport validate_kernel(const KernelSpec& spec,
                                 const CookieEnvironment& p_env);

// Conditional probability, given the p-pair outcome (Y_i, Y_j) = (0, 1), of
// emitting the q-pair outcome (Z_i, Z_j) = (1, 0).  The remaining outcomes
// (1,1), (0,0), (1,0) map to themselves.  Solving the marginal-matching
// equation a (1 - p_i) p_j = p_j - p_i gives
//   a = (p_j - p_i) / ((1 - p_i) p_j).
double swap_mixing_coefficient(double p_i, double p_j);

struct CompiledStage {
  CompiledStage(KernelSpec::Kind k, CookieEnvironment in_env,
                CookieEnvironment out_env)
      : kind(k), in(std::move(in_env)), out(std::move(out_env)) {}

  KernelSpec::Kind kind;  // never kCompose
  CookieEnvironment in;
  CookieEnvironment out;
  int swap_i = 0;
  int swap_j = 0;
  double mix_a = 0.0;

  // For a periodic input the swap acts inside every period block; the pair
  // containing 1-based index k, or nullopt.
  std::optional<std::pair<int64_t, int64_t>> swap_pair_of(int64_t k) const;
};

class CouplingKernel {
 public:
  // Throws std::invalid_argument with the validate_kernel message on a
  // structurally invalid spec.
  static CouplingKernel compile(const KernelSpec& spec,
                                const CookieEnvironment& p_env);

  const KernelSpec& spec() const { return spec_; }
  const CookieEnvironment& p_env() const { return p_env_; }
  const CookieEnvironment& q_env() const { return q_env_; }
  const std::vector<CompiledStage>& stages() const { return stages_; }

  bool is_identity() const { return strict_from_ == 0; }

 private:
  friend int compute_m0(const CouplingKernel&);
  CouplingKernel(KernelSpec spec, CookieEnvironment p, CookieEnvironment q,
                 std::vector<CompiledStage> stages, int64_t strict_from);

  KernelSpec spec_;
  CookieEnvironment p_env_;
  CookieEnvironment q_env_;
  std::vector<CompiledStage> stages_;
  int64_t strict_from_ = 0;  // least prefix length admitting strictness, 0 = none
};

// Least m with positive probability of a strict prefix inequality.  Throws
// std::domain_error for the identity (no strict index exists).
int compute_m0(const CouplingKernel& kernel);

// Smallest depth >= depth such that every swap pair starting inside the
// window also ends inside it.  Sampling and enumeration always materialize
// closed windows so later extensions never revisit a pair.
int64_t closed_depth(const CouplingKernel& kernel, int64_t depth);

struct SitePairSample {
  std::vector<uint8_t> y;
  std::vector<uint8_t> z;
  int64_t sum_y = 0;  // running prefix sums at the end of the window
  int64_t sum_z = 0;
};

// Extends a site's coupled cookie sequence to at least `depth` (rounded up to
// a closed window).  Draws are keyed by (stream, site, lane, index), so the
// result does not depend on the order or granularity of extensions.  Verifies
// prefix domination on the extension and throws std::logic_error on a
// violation (a kernel bug, never swallowed).
void extend_site_pair(const CouplingKernel& kernel, uint64_t stream_word,
                      int64_t site, int64_t depth, SitePairSample& io);

SitePairSample sample_site_pair(const CouplingKernel& kernel,
                                const SeedKey& key, int64_t site,
                                int64_t depth);

inline constexpr int kMaxJointDepth = 12;

// Exact joint law of (Y_1..depth, Z_1..depth); bit m-1 of a mask holds the
// value at cookie index m.
struct JointPrefixDistribution {
  int depth = 0;
  std::map<std::pair<uint32_t, uint32_t>, double> atoms;
};

JointPrefixDistribution exact_joint_distribution(const CouplingKernel& kernel,
                                                 int depth);

// P(exists m <= depth with a strict prefix inequality), exact.
double exact_strict_prefix_probability(const CouplingKernel& kernel, int depth);

// P(strict prefix inequality at exactly length m), exact.
double exact_strict_at_probability(const CouplingKernel& kernel, int m);

}  // namespace erw
