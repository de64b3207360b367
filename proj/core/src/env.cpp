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

#include "erw/env.hpp"

#include <cmath>
#include <stdexcept>

namespace erw {

namespace {
// Ellipticity margin: probabilities must stay this far away from {0, 1}.
constexpr double kEllipticityEps = 1e-12;
// Slack for "exactly on a threshold" comparisons of derived quantities.
constexpr double kThresholdTol = 1e-12;
}  // namespace

std::string to_string(EnvForm form) {
  switch (form) {
    case EnvForm::kFiniteExcitation:
      return "finite";
    case EnvForm::kPeriodic:
      return "periodic";
  }
  return "?";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::kRecurrentOrLeft:
      return "RecurrentOrLeft";
    case Classification::kTransientZeroSpeed:
      return "TransientZeroSpeed";
    case Classification::kTransientPositiveSpeed:
      return "TransientPositiveSpeed";
    case Classification::kTransientRightUnknownSpeed:
      return "TransientRightUnknownSpeed";
  }
  return "?";
}

CookieEnvironment::CookieEnvironment(EnvForm form, std::vector<double> probs)
    : form_(form), probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("cookie environment needs at least one cookie");
  }
  for (size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < kEllipticityEps || p > 1.0 - kEllipticityEps) {
      throw std::invalid_argument("cookie probability p_" + std::to_string(i + 1) +
                                  " = " + std::to_string(p) +
                                  " violates ellipticity (must lie strictly in (0,1))");
    }
  }
}

CookieEnvironment CookieEnvironment::finite(std::vector<double> probs) {
  return CookieEnvironment(EnvForm::kFiniteExcitation, std::move(probs));
}

CookieEnvironment CookieEnvironment::periodic(std::vector<double> probs) {
  return CookieEnvironment(EnvForm::kPeriodic, std::move(probs));
}

double delta(const CookieEnvironment& env) {
  if (env.form() != EnvForm::kFiniteExcitation) {
    throw std::domain_error(
        "delta is defined only for finite-excitation environments; "
        "use pbar/theta for periodic ones");
  }
  double sum = 0.0;
  for (double p : env.probs()) sum += 2.0 * p - 1.0;
  return sum;
}

double pbar(const CookieEnvironment& env) {
  if (env.form() != EnvForm::kPeriodic) {
    throw std::domain_error("pbar is defined only for periodic environments");
  }
  double sum = 0.0;
  for (double p : env.probs()) sum += p;
  return sum / static_cast<double>(env.probs().size());
}

double theta(const CookieEnvironment& env) {
  if (env.form() != EnvForm::kPeriodic) {
    throw std::domain_error("theta is defined only for periodic environments");
  }
  const auto& p = env.probs();
  double numerator = 0.0;
  double drift_prefix = 0.0;
  double denominator = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    drift_prefix += 2.0 * p[i] - 1.0;
    numerator += (1.0 - p[i]) * drift_prefix;
    denominator += p[i] * (1.0 - p[i]);
  }
  // denominator > 0 under ellipticity
  return numerator / (4.0 * denominator);
}

EnvDiagnostics classify(const CookieEnvironment& env) {
  EnvDiagnostics d;
  if (env.form() == EnvForm::kFiniteExcitation) {
    const double dv = delta(env);
    d.delta = dv;
    if (dv > 2.0) {
      d.classification = Classification::kTransientPositiveSpeed;
    } else if (dv > 1.0) {
      d.classification = Classification::kTransientZeroSpeed;
    } else {
      d.classification = Classification::kRecurrentOrLeft;
    }
    for (double threshold : {0.0, 1.0, -1.0, 2.0}) {
      if (std::abs(dv - threshold) <= kThresholdTol) d.boundary = true;
    }
    return d;
  }
  const double pb = pbar(env);
  const double th = theta(env);
  d.pbar = pb;
  d.theta = th;
  if (pb > 0.5 + kThresholdTol) {
    d.classification = Classification::kTransientPositiveSpeed;
  } else if (std::abs(pb - 0.5) <= kThresholdTol) {
    if (th > 1.0) {
      // transient right, but no speed-positivity criterion is available
      d.classification = Classification::kTransientRightUnknownSpeed;
    } else {
      d.classification = Classification::kRecurrentOrLeft;
      d.sufficient_only = true;
    }
  } else {
    d.classification = Classification::kRecurrentOrLeft;
  }
  return d;
}

}  // namespace erw
