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
#include <stdexcept>
#include <string>
#include <vector>

#include "erw/coupling.hpp"
#include "erw/env.hpp"
#include "erw/prng.hpp"

namespace erw {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvSpec {
  EnvForm form = EnvForm::kFiniteExcitation;
  std::vector<double> probs;
};

struct OracleOptions {
  int n = 6;
  std::string mode = "paths";  // paths | joint | dominance
  std::optional<int64_t> hit_level;
  std::optional<int64_t> by_time;
};

struct SweepOptions {
  EnvForm form = EnvForm::kFiniteExcitation;
  std::vector<std::vector<double>> grid;
  bool speed = false;
};

// A config plus the artifact version determines every output byte.
struct ExperimentConfig {
  std::optional<EnvSpec> env;
  std::optional<KernelSpec> kernel;
  int64_t horizon = 10000;
  int64_t replicas = 1000;
  int64_t guard = 50;
  uint64_t seed = kDefaultSeed;
  std::string out;  // empty = stdout
  std::string format = "json";
  bool negative_control = false;
  OracleOptions oracle;
  SweepOptions sweep;
};

ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

CookieEnvironment make_environment(const EnvSpec& spec);

}  // namespace erw
