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

#include "erw/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace erw {

namespace {

using nlohmann::json;

EnvForm parse_form(const std::string& form) {
  if (form == "finite") return EnvForm::kFiniteExcitation;
  if (form == "periodic") return EnvForm::kPeriodic;
  throw ConfigError("env.form must be \"finite\" or \"periodic\", got \"" + form + "\"");
}

EnvSpec parse_env(const json& j) {
  if (!j.is_object()) throw ConfigError("env must be an object");
  EnvSpec spec;
  spec.form = parse_form(j.value("form", "finite"));
  if (!j.contains("probs") || !j.at("probs").is_array()) {
    throw ConfigError("env.probs must be an array of reals");
  }
  for (const auto& v : j.at("probs")) {
    if (!v.is_number()) throw ConfigError("env.probs entries must be numbers");
    spec.probs.push_back(v.get<double>());
  }
  return spec;
}

KernelSpec parse_kernel(const json& j) {
  if (!j.is_object()) throw ConfigError("kernel must be an object");
  const std::string construction = j.value("construction", "");
  if (construction == "identity") return KernelSpec::identity();
  if (construction == "pointwise") {
    if (!j.contains("target") || !j.at("target").is_array()) {
      throw ConfigError("pointwise kernel needs a \"target\" probability array");
    }
    std::vector<double> target;
    for (const auto& v : j.at("target")) target.push_back(v.get<double>());
    return KernelSpec::pointwise(std::move(target));
  }
  if (construction == "swap") {
    if (!j.contains("swap") || !j.at("swap").is_array() || j.at("swap").size() != 2) {
      throw ConfigError("swap kernel needs \"swap\": [i, j]");
    }
    return KernelSpec::swap(j.at("swap")[0].get<int>(), j.at("swap")[1].get<int>());
  }
  if (construction == "compose") {
    if (!j.contains("compose") || !j.at("compose").is_array() || j.at("compose").empty()) {
      throw ConfigError("compose kernel needs a non-empty \"compose\" array");
    }
    std::vector<KernelSpec> stages;
    for (const auto& stage : j.at("compose")) stages.push_back(parse_kernel(stage));
    return KernelSpec::compose(std::move(stages));
  }
  throw ConfigError("kernel.construction must be identity | pointwise | swap | compose");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  ExperimentConfig cfg;
  try {
    if (j.contains("env")) cfg.env = parse_env(j.at("env"));
    if (j.contains("kernel")) cfg.kernel = parse_kernel(j.at("kernel"));
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<int64_t>();
    if (j.contains("replicas")) cfg.replicas = j.at("replicas").get<int64_t>();
    if (j.contains("guard")) cfg.guard = j.at("guard").get<int64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    if (j.contains("negative_control")) {
      cfg.negative_control = j.at("negative_control").get<bool>();
    }
    if (j.contains("oracle")) {
      const json& o = j.at("oracle");
      cfg.oracle.n = o.value("n", cfg.oracle.n);
      cfg.oracle.mode = o.value("mode", cfg.oracle.mode);
      if (o.contains("hit_level")) cfg.oracle.hit_level = o.at("hit_level").get<int64_t>();
      if (o.contains("by_time")) cfg.oracle.by_time = o.at("by_time").get<int64_t>();
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      cfg.sweep.form = parse_form(s.value("form", "finite"));
      cfg.sweep.speed = s.value("speed", false);
      if (s.contains("grid")) {
        for (const auto& point : s.at("grid")) {
          std::vector<double> probs;
          for (const auto& v : point) probs.push_back(v.get<double>());
          cfg.sweep.grid.push_back(std::move(probs));
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config field: ") + e.what());
  }

  if (cfg.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (cfg.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (cfg.guard < 1) throw ConfigError("guard must be >= 1");
  if (cfg.format != "json" && cfg.format != "csv") {
    throw ConfigError("format must be \"json\" or \"csv\"");
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

CookieEnvironment make_environment(const EnvSpec& spec) {
  try {
    return spec.form == EnvForm::kPeriodic
               ? CookieEnvironment::periodic(spec.probs)
               : CookieEnvironment::finite(spec.probs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace erw
