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

#include "erw/coupling.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "erw/stats.hpp"
#include "kernel_units.hpp"

namespace erw {

KernelSpec KernelSpec::identity() { return KernelSpec{}; }

KernelSpec KernelSpec::pointwise(std::vector<double> target) {
  KernelSpec s;
  s.kind = Kind::kPointwise;
  s.target = std::move(target);
  return s;
}

KernelSpec KernelSpec::swap(int i, int j) {
  KernelSpec s;
  s.kind = Kind::kSwap;
  s.swap_i = i;
  s.swap_j = j;
  return s;
}

KernelSpec KernelSpec::compose(std::vector<KernelSpec> stages) {
  KernelSpec s;
  s.kind = Kind::kCompose;
  s.stages = std::move(stages);
  return s;
}

double swap_mixing_coefficient(double p_i, double p_j) {
  if (!(p_i > 0.0 && p_i < 1.0 && p_j > 0.0 && p_j < 1.0)) {
    throw std::invalid_argument("swap_mixing_coefficient: probabilities must lie in (0,1)");
  }
  if (!(p_j > p_i)) {
    throw std::invalid_argument("swap_mixing_coefficient: requires p_j > p_i (not a favorable swap)");
  }
  return (p_j - p_i) / ((1.0 - p_i) * p_j);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Validates one non-compose stage and derives its output environment.
ValidationReport derive_stage(const KernelSpec& spec, const CookieEnvironment& in,
                              CookieEnvironment* out) {
  switch (spec.kind) {
    case KernelSpec::Kind::kIdentity:
      *out = in;
      return {};
    case KernelSpec::Kind::kPointwise: {
      if (spec.target.empty()) return {false, "pointwise: empty target"};
      for (size_t t = 0; t < spec.target.size(); ++t) {
        const double q = spec.target[t];
        if (!(q > 0.0 && q < 1.0)) {
          return {false, "pointwise: target q_" + std::to_string(t + 1) + " = " +
                             fmt(q) + " violates ellipticity"};
        }
      }
      if (in.form() == EnvForm::kPeriodic &&
          spec.target.size() != in.probs().size()) {
        return {false, "pointwise: periodic target must keep the period (expected " +
                           std::to_string(in.probs().size()) + " values, got " +
                           std::to_string(spec.target.size()) + ")"};
      }
      CookieEnvironment q = in.form() == EnvForm::kPeriodic
                                ? CookieEnvironment::periodic(spec.target)
                                : CookieEnvironment::finite(spec.target);
      const int64_t horizon =
          std::max<int64_t>(in.prefix_len(), q.prefix_len());
      bool strict = false;
      for (int64_t k = 1; k <= horizon; ++k) {
        const double pk = in.cookie_prob(k);
        const double qk = q.cookie_prob(k);
        if (qk < pk) {
          return {false, "pointwise: requires p_k <= q_k for every k; violated at k=" +
                             std::to_string(k) + " (p=" + fmt(pk) + ", q=" + fmt(qk) + ")"};
        }
        if (qk > pk) strict = true;
      }
      if (!strict) {
        return {false, "pointwise: requires a strict increase at some k "
                       "(use the identity construction for equal environments)"};
      }
      *out = std::move(q);
      return {};
    }
    case KernelSpec::Kind::kSwap: {
      const int i = spec.swap_i;
      const int j = spec.swap_j;
      if (!(i >= 1 && i < j)) {
        return {false, "favorable swap requires 1 <= i < j (got i=" + std::to_string(i) +
                           ", j=" + std::to_string(j) + ")"};
      }
      if (in.form() == EnvForm::kPeriodic && j > in.prefix_len()) {
        return {false, "periodic swap indices must lie within one period block (period " +
                           std::to_string(in.prefix_len()) + ", got j=" +
                           std::to_string(j) + ")"};
      }
      const double pi = in.cookie_prob(i);
      const double pj = in.cookie_prob(j);
      if (!(pj > pi)) {
        return {false, "favorable swap requires p_j > p_i (p_" + std::to_string(i) +
                           "=" + fmt(pi) + ", p_" + std::to_string(j) + "=" + fmt(pj) + ")"};
      }
      std::vector<double> probs = in.probs();
      if (in.form() == EnvForm::kFiniteExcitation &&
          j > static_cast<int>(probs.size())) {
        probs.resize(static_cast<size_t>(j), 0.5);
      }
      std::swap(probs[static_cast<size_t>(i - 1)], probs[static_cast<size_t>(j - 1)]);
      *out = in.form() == EnvForm::kPeriodic
                 ? CookieEnvironment::periodic(std::move(probs))
                 : CookieEnvironment::finite(std::move(probs));
      return {};
    }
    case KernelSpec::Kind::kCompose:
      return {false, "internal: compose is not a stage"};
  }
  return {false, "internal: unknown construction"};
}

ValidationReport walk_spec(const KernelSpec& spec, const CookieEnvironment& in,
                           CookieEnvironment* out,
                           std::vector<CompiledStage>* stages) {
  if (spec.kind == KernelSpec::Kind::kCompose) {
    if (spec.stages.empty()) return {false, "compose: requires at least one stage"};
    CookieEnvironment cur = in;
    for (size_t s = 0; s < spec.stages.size(); ++s) {
      CookieEnvironment next = cur;
      auto rep = walk_spec(spec.stages[s], cur, &next, stages);
      if (!rep.ok) {
        return {false, "compose stage " + std::to_string(s + 1) + ": " + rep.message};
      }
      cur = std::move(next);
    }
    *out = std::move(cur);
    return {};
  }
  CookieEnvironment derived = in;
  auto rep = derive_stage(spec, in, &derived);
  if (!rep.ok) return rep;
  if (stages != nullptr) {
    CompiledStage st(spec.kind, in, derived);
    if (spec.kind == KernelSpec::Kind::kSwap) {
      st.swap_i = spec.swap_i;
      st.swap_j = spec.swap_j;
      st.mix_a = swap_mixing_coefficient(in.cookie_prob(spec.swap_i),
                                         in.cookie_prob(spec.swap_j));
    }
    stages->push_back(std::move(st));
  }
  *out = std::move(derived);
  return {};
}

// Least cookie index at which the stage can produce a strict prefix
// inequality, or 0 for an identity stage.
int64_t stage_strict_from(const CompiledStage& st) {
  switch (st.kind) {
    case KernelSpec::Kind::kIdentity:
      return 0;
    case KernelSpec::Kind::kSwap:
      return st.swap_i;
    case KernelSpec::Kind::kPointwise: {
      const int64_t horizon =
          std::max<int64_t>(st.in.prefix_len(), st.out.prefix_len());
      for (int64_t k = 1; k <= horizon; ++k) {
        if (st.out.cookie_prob(k) > st.in.cookie_prob(k)) return k;
      }
      return 0;  // unreachable after validation
    }
    case KernelSpec::Kind::kCompose:
      return 0;
  }
  return 0;
}

}  // namespace

std::optional<std::pair<int64_t, int64_t>> CompiledStage::swap_pair_of(
    int64_t k) const {
  if (kind != KernelSpec::Kind::kSwap) return std::nullopt;
  if (in.form() == EnvForm::kFiniteExcitation) {
    if (k == swap_i || k == swap_j) return std::make_pair<int64_t, int64_t>(swap_i, swap_j);
    return std::nullopt;
  }
  const int64_t period = in.prefix_len();
  const int64_t r = (k - 1) % period + 1;
  const int64_t block = k - r;
  if (r == swap_i || r == swap_j) {
    return std::make_pair(block + swap_i, block + swap_j);
  }
  return std::nullopt;
}

ValidationReport validate_kernel(const KernelSpec& spec,
                                 const CookieEnvironment& p_env) {
  CookieEnvironment out = p_env;
  return walk_spec(spec, p_env, &out, nullptr);
}

CouplingKernel::CouplingKernel(KernelSpec spec, CookieEnvironment p,
                               CookieEnvironment q,
                               std::vector<CompiledStage> stages,
                               int64_t strict_from)
    : spec_(std::move(spec)),
      p_env_(std::move(p)),
      q_env_(std::move(q)),
      stages_(std::move(stages)),
      strict_from_(strict_from) {}

CouplingKernel CouplingKernel::compile(const KernelSpec& spec,
                                       const CookieEnvironment& p_env) {
  CookieEnvironment q = p_env;
  std::vector<CompiledStage> stages;
  auto rep = walk_spec(spec, p_env, &q, &stages);
  if (!rep.ok) throw std::invalid_argument("invalid coupling kernel: " + rep.message);
  int64_t strict_from = 0;
  for (const auto& st : stages) {
    const int64_t s = stage_strict_from(st);
    if (s > 0 && (strict_from == 0 || s < strict_from)) strict_from = s;
  }
  return CouplingKernel(spec, p_env, std::move(q), std::move(stages), strict_from);
}

int compute_m0(const CouplingKernel& kernel) {
  if (kernel.strict_from_ == 0) {
    throw std::domain_error(
        "compute_m0: coupling admits no strict prefix inequality "
        "(identity construction)");
  }
  return static_cast<int>(kernel.strict_from_);
}

int64_t closed_depth(const CouplingKernel& kernel, int64_t depth) {
  int64_t d = std::max<int64_t>(depth, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& st : kernel.stages()) {
      if (st.kind != KernelSpec::Kind::kSwap) continue;
      if (st.in.form() == EnvForm::kFiniteExcitation) {
        if (st.swap_i <= d && d < st.swap_j) {
          d = st.swap_j;
          changed = true;
        }
      } else {
        const int64_t period = st.in.prefix_len();
        if (d < st.swap_i) continue;
        const int64_t block = (d - st.swap_i) / period;  // last block whose pair starts
        const int64_t second = block * period + st.swap_j;
        if (second > d) {
          d = second;
          changed = true;
        }
      }
    }
  }
  return d;
}

namespace {

// Applies one stage in place on cookie window [from, to] (1-based, closed).
// Swap pairs starting in the window end inside it by the closed-window
// invariant.
void apply_stage_window(const CompiledStage& st, uint64_t stream_word,
                        int64_t site, uint32_t lane, int64_t from, int64_t to,
                        std::vector<uint8_t>& w) {
  switch (st.kind) {
    case KernelSpec::Kind::kIdentity:
      return;
    case KernelSpec::Kind::kPointwise:
      for (int64_t k = from; k <= to; ++k) {
        if (w[static_cast<size_t>(k - 1)]) continue;
        const double pk = st.in.cookie_prob(k);
        const double qk = st.out.cookie_prob(k);
        if (qk <= pk) continue;
        const double c = (qk - pk) / (1.0 - pk);
        if (keyed_uniform(stream_word, site, lane, static_cast<uint64_t>(k)) < c) {
          w[static_cast<size_t>(k - 1)] = 1;
        }
      }
      return;
    case KernelSpec::Kind::kSwap: {
      auto process_pair = [&](int64_t i, int64_t j) {
        uint8_t& wi = w[static_cast<size_t>(i - 1)];
        uint8_t& wj = w[static_cast<size_t>(j - 1)];
        if (wi == 0 && wj == 1) {
          if (keyed_uniform(stream_word, site, lane, static_cast<uint64_t>(i)) <
              st.mix_a) {
            wi = 1;
            wj = 0;
          }
        }
      };
      if (st.in.form() == EnvForm::kFiniteExcitation) {
        if (st.swap_i >= from && st.swap_i <= to) process_pair(st.swap_i, st.swap_j);
      } else {
        const int64_t period = st.in.prefix_len();
        int64_t b = (from - st.swap_i + period - 1) / period;
        if (b < 0) b = 0;
        for (; b * period + st.swap_i <= to; ++b) {
          process_pair(b * period + st.swap_i, b * period + st.swap_j);
        }
      }
      return;
    }
    case KernelSpec::Kind::kCompose:
      return;  // never compiled
  }
}

}  // namespace

void extend_site_pair(const CouplingKernel& kernel, uint64_t stream_word,
                      int64_t site, int64_t depth, SitePairSample& io) {
  const int64_t d0 = static_cast<int64_t>(io.y.size());
  if (depth <= d0) return;
  const int64_t d1 = closed_depth(kernel, depth);
  io.y.resize(static_cast<size_t>(d1));
  io.z.resize(static_cast<size_t>(d1));
  const CookieEnvironment& p = kernel.p_env();
  for (int64_t k = d0 + 1; k <= d1; ++k) {
    io.y[static_cast<size_t>(k - 1)] =
        keyed_uniform(stream_word, site, 0, static_cast<uint64_t>(k)) <
                p.cookie_prob(k)
            ? 1
            : 0;
  }
  std::copy(io.y.begin() + d0, io.y.end(), io.z.begin() + d0);
  uint32_t lane = 1;
  for (const auto& st : kernel.stages()) {
    apply_stage_window(st, stream_word, site, lane, d0 + 1, d1, io.z);
    ++lane;
  }
  for (int64_t k = d0 + 1; k <= d1; ++k) {
    io.sum_y += io.y[static_cast<size_t>(k - 1)];
    io.sum_z += io.z[static_cast<size_t>(k - 1)];
    if (io.sum_y > io.sum_z) {
      throw std::logic_error(
          "coupling kernel violated prefix-sum domination at site " +
          std::to_string(site) + ", cookie " + std::to_string(k) +
          " (kernel bug)");
    }
  }
}

SitePairSample sample_site_pair(const CouplingKernel& kernel,
                                const SeedKey& key, int64_t site,
                                int64_t depth) {
  if (depth < 1) throw std::invalid_argument("sample_site_pair: depth must be >= 1");
  SitePairSample s;
  extend_site_pair(kernel, key.stream_word(), site, depth, s);
  return s;
}

JointPrefixDistribution exact_joint_distribution(const CouplingKernel& kernel,
                                                 int depth) {
  if (depth < 1 || depth > kMaxJointDepth) {
    throw std::invalid_argument("exact_joint_distribution: depth must lie in [1, " +
                                std::to_string(kMaxJointDepth) + "]");
  }
  JointPrefixDistribution dist;
  dist.depth = depth;
  const uint32_t keep = depth >= 32 ? ~0u : ((1u << depth) - 1u);
  detail::enumerate_joint<double>(
      kernel, depth, [&](uint64_t y, uint64_t z, const double& prob) {
        auto key = std::make_pair(static_cast<uint32_t>(y) & keep,
                                  static_cast<uint32_t>(z) & keep);
        dist.atoms[key] += prob;
      });
  return dist;
}

double exact_strict_prefix_probability(const CouplingKernel& kernel, int depth) {
  if (depth < 1 || depth > kMaxJointDepth) {
    throw std::invalid_argument("exact_strict_prefix_probability: depth out of range");
  }
  KahanSum total;
  detail::enumerate_joint<double>(
      kernel, depth, [&](uint64_t y, uint64_t z, const double& prob) {
        int sy = 0, sz = 0;
        for (int m = 0; m < depth; ++m) {
          sy += static_cast<int>((y >> m) & 1u);
          sz += static_cast<int>((z >> m) & 1u);
          if (sy < sz) {
            total.add(prob);
            return;
          }
        }
      });
  return total.value();
}

double exact_strict_at_probability(const CouplingKernel& kernel, int m) {
  if (m < 1 || m > kMaxJointDepth) {
    throw std::invalid_argument("exact_strict_at_probability: m out of range");
  }
  KahanSum total;
  detail::enumerate_joint<double>(
      kernel, m, [&](uint64_t y, uint64_t z, const double& prob) {
        int sy = 0, sz = 0;
        for (int t = 0; t < m; ++t) {
          sy += static_cast<int>((y >> t) & 1u);
          sz += static_cast<int>((z >> t) & 1u);
        }
        if (sy < sz) total.add(prob);
      });
  return total.value();
}

}  // namespace erw
