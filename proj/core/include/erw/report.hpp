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

#include <optional>
#include <string>
#include <vector>

#include "erw/checks.hpp"
#include "erw/config.hpp"
#include "erw/oracle.hpp"
#include "erw/regen.hpp"

namespace erw {

// Report serialization.  JSON reports carry schema_version; the CSV column
// sets below are schema v1 and frozen.  Output is byte-reproducible for a
// fixed config and version.

inline constexpr int kReportSchemaVersion = 1;

std::string classify_report_json(const EnvSpec& spec, const EnvDiagnostics& d);

std::string check_report_csv(const CheckSuiteResult& result, uint64_t seed);
std::string check_report_json(const CheckSuiteResult& result, uint64_t seed);

struct SpeedBundle {
  std::optional<SpeedEstimate> naive;
  std::optional<SpeedReport> regen;
  std::optional<PairedSpeedReport> paired;
  std::optional<RegenProbabilityReport> regen_prob;
};

std::string speed_report_json(const ExperimentConfig& cfg, const SpeedBundle& bundle);
std::string speed_report_csv(const SpeedBundle& bundle);

std::string oracle_paths_json(const ExperimentConfig& cfg,
                              const ExactPathDistribution& dist,
                              std::optional<double> query_result);
std::string oracle_joint_json(const ExperimentConfig& cfg,
                              const ExactCoupledDistribution& dist,
                              const AtomCheckReport& order);
std::string dominance_report_json(const ExperimentConfig& cfg,
                                  const DominanceReport& report);

struct SweepRow {
  std::vector<double> probs;
  EnvForm form = EnvForm::kFiniteExcitation;
  std::optional<double> delta;
  std::optional<double> pbar;
  std::optional<double> theta;
  std::string classification;
  std::optional<SpeedEstimate> speed;
  std::string error;
};

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace erw
