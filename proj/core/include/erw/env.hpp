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
#include <optional>
#include <string>
#include <vector>

namespace erw {

enum class EnvForm {
  kFiniteExcitation,  // stored prefix, cookie 1/2 beyond it
  kPeriodic,          // stored block repeated forever
};

enum class Classification {
  kRecurrentOrLeft,
  kTransientZeroSpeed,
  kTransientPositiveSpeed,
  kTransientRightUnknownSpeed,
};

std::string to_string(EnvForm form);
std::string to_string(Classification c);

// Deterministic elliptic cookie environment: cookie_prob(k) is the chance of
// stepping right on the k-th departure from any site.  Every stored value
// must lie strictly inside (0,1); construction rejects anything else.
class CookieEnvironment {
 public:
  static CookieEnvironment finite(std::vector<double> probs);
  static CookieEnvironment periodic(std::vector<double> probs);

  EnvForm form() const { return form_; }
  const std::vector<double>& probs() const { return probs_; }
  int prefix_len() const { return static_cast<int>(probs_.size()); }

  // Total for every k >= 1.
  double cookie_prob(int64_t k) const {
    if (form_ == EnvForm::kFiniteExcitation) {
      return k <= static_cast<int64_t>(probs_.size())
                 ? probs_[static_cast<size_t>(k - 1)]
                 : 0.5;
    }
    return probs_[static_cast<size_t>((k - 1) % probs_.size())];
  }

  bool operator==(const CookieEnvironment&) const = default;

 private:
  CookieEnvironment(EnvForm form, std::vector<double> probs);

  EnvForm form_ = EnvForm::kFiniteExcitation;
  std::vector<double> probs_;
};

struct EnvDiagnostics {
  std::optional<double> delta;  // finite form only
  std::optional<double> pbar;   // periodic form only
  std::optional<double> theta;  // periodic form only
  Classification classification = Classification::kRecurrentOrLeft;
  // delta sits exactly on one of the drift/transience/speed thresholds
  bool boundary = false;
  // periodic with pbar = 1/2 and theta <= 1: the transience criterion is
  // only sufficient, so this label may overstate recurrence
  bool sufficient_only = false;
};

// Finite-excitation drift sum over the stored prefix.  Rejects periodic
// environments (the infinite sum has no finite value there); callers should
// use pbar/theta instead.
double delta(const CookieEnvironment& env);

double pbar(const CookieEnvironment& env);   // periodic only
double theta(const CookieEnvironment& env);  // periodic only

EnvDiagnostics classify(const CookieEnvironment& env);

}  // namespace erw
