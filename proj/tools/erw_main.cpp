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

// Experiment runner: classify environments, verify path-wise coupling
// properties, estimate speeds, dump exact small-horizon laws, sweep grids.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "erw/checks.hpp"
#include "erw/config.hpp"
#include "erw/oracle.hpp"
#include "erw/parallel.hpp"
#include "erw/regen.hpp"
#include "erw/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitViolation = 2;
constexpr int kExitInsufficientRegen = 3;

struct FlagOverrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> replicas;
  std::optional<int64_t> horizon;
  std::optional<int64_t> guard;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool negative_control = false;
};

erw::ExperimentConfig resolve_config(const FlagOverrides& flags) {
  erw::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = erw::load_config_file(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.replicas) cfg.replicas = *flags.replicas;
  if (flags.horizon) cfg.horizon = *flags.horizon;
  if (flags.guard) cfg.guard = *flags.guard;
  if (flags.out) cfg.out = *flags.out;
  if (flags.format) cfg.format = *flags.format;
  if (flags.negative_control) cfg.negative_control = true;
  return cfg;
}

void write_output(const erw::ExperimentConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw erw::ConfigError("cannot write output file: " + cfg.out);
  out << text;
}

erw::CookieEnvironment require_env(const erw::ExperimentConfig& cfg) {
  if (!cfg.env) throw erw::ConfigError("this command needs an \"env\" config entry");
  return erw::make_environment(*cfg.env);
}

erw::CouplingKernel require_kernel(const erw::ExperimentConfig& cfg,
                                   const erw::CookieEnvironment& env) {
  if (!cfg.kernel) throw erw::ConfigError("this command needs a \"kernel\" config entry");
  const auto report = erw::validate_kernel(*cfg.kernel, env);
  if (!report.ok) throw erw::ConfigError("invalid kernel: " + report.message);
  return erw::CouplingKernel::compile(*cfg.kernel, env);
}

int cmd_classify(const erw::ExperimentConfig& cfg) {
  const erw::CookieEnvironment env = require_env(cfg);
  const erw::EnvDiagnostics d = erw::classify(env);
  write_output(cfg, erw::classify_report_json(*cfg.env, d));
  return kExitOk;
}

int cmd_check(const erw::ExperimentConfig& cfg) {
  const erw::CookieEnvironment env = require_env(cfg);
  const erw::CouplingKernel kernel = require_kernel(cfg, env);
  const erw::CheckSuiteResult result =
      erw::run_check_suite(kernel, cfg.seed, cfg.replicas, cfg.horizon,
                           cfg.guard, cfg.negative_control);
  write_output(cfg, cfg.format == "csv" ? erw::check_report_csv(result, cfg.seed)
                                        : erw::check_report_json(result, cfg.seed));
  return result.ok() ? kExitOk : kExitViolation;
}

int cmd_speed(const erw::ExperimentConfig& cfg) {
  const erw::CookieEnvironment env = require_env(cfg);
  erw::SpeedBundle bundle;
  bundle.naive = erw::naive_speed(env, cfg.seed, cfg.replicas, cfg.horizon);
  bundle.regen = erw::speed_regeneration(env, cfg.seed, cfg.replicas,
                                         cfg.horizon, cfg.guard);
  if (cfg.kernel) {
    const erw::CouplingKernel kernel = require_kernel(cfg, env);
    bundle.paired = erw::coupled_speed_pair(kernel, cfg.seed, cfg.replicas,
                                            cfg.horizon, cfg.guard);
    bundle.regen_prob = erw::regen_probability(kernel, cfg.seed, cfg.replicas,
                                               cfg.horizon, cfg.guard);
  }
  write_output(cfg, cfg.format == "csv" ? erw::speed_report_csv(bundle)
                                        : erw::speed_report_json(cfg, bundle));
  return kExitOk;
}

int cmd_oracle(const erw::ExperimentConfig& cfg) {
  const erw::CookieEnvironment env = require_env(cfg);
  const auto& opt = cfg.oracle;
  if (opt.mode == "paths") {
    const erw::ExactPathDistribution dist = erw::exact_path_distribution(env, opt.n);
    std::optional<double> query;
    if (opt.hit_level) {
      query = erw::hit_level_by_time_probability(
          dist, *opt.hit_level, opt.by_time ? *opt.by_time : opt.n);
    }
    write_output(cfg, erw::oracle_paths_json(cfg, dist, query));
    return kExitOk;
  }
  if (opt.mode == "joint") {
    const erw::CouplingKernel kernel = require_kernel(cfg, env);
    const erw::ExactCoupledDistribution dist =
        erw::exact_coupled_distribution(kernel, opt.n);
    const erw::AtomCheckReport order = erw::exact_order_check(dist);
    write_output(cfg, erw::oracle_joint_json(cfg, dist, order));
    return order.violating_atoms == 0 ? kExitOk : kExitViolation;
  }
  if (opt.mode == "dominance") {
    const erw::CouplingKernel kernel = require_kernel(cfg, env);
    const erw::DominanceReport report =
        erw::exact_dominance_check(kernel.p_env(), kernel.q_env(), opt.n);
    write_output(cfg, erw::dominance_report_json(cfg, report));
    return report.ok ? kExitOk : kExitViolation;
  }
  throw erw::ConfigError("oracle.mode must be paths | joint | dominance");
}

int cmd_sweep(const erw::ExperimentConfig& cfg) {
  std::vector<erw::SweepRow> rows;
  for (const auto& probs : cfg.sweep.grid) {
    erw::SweepRow row;
    row.probs = probs;
    row.form = cfg.sweep.form;
    try {
      const erw::CookieEnvironment env =
          erw::make_environment(erw::EnvSpec{cfg.sweep.form, probs});
      const erw::EnvDiagnostics d = erw::classify(env);
      row.delta = d.delta;
      row.pbar = d.pbar;
      row.theta = d.theta;
      row.classification = erw::to_string(d.classification);
      if (d.boundary) row.classification += "-boundary";
      if (cfg.sweep.speed) {
        row.speed = erw::naive_speed(env, cfg.seed, cfg.replicas, cfg.horizon);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  write_output(cfg, erw::sweep_csv(rows));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"excited random walk coupling laboratory"};
  app.require_subcommand(1);

  FlagOverrides flags;
  uint64_t seed_flag = 0;
  int64_t replicas_flag = 0, horizon_flag = 0, guard_flag = 0;
  std::string out_flag, format_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "config file (JSON)");
    sub->add_option("--seed", seed_flag, "master seed");
    sub->add_option("--replicas", replicas_flag, "replica count");
    sub->add_option("--horizon", horizon_flag, "walk horizon (steps)");
    sub->add_option("--guard", guard_flag, "censoring guard buffer");
    sub->add_option("--out", out_flag, "output path (default stdout)");
    sub->add_option("--format", format_flag, "csv|json");
    sub->add_flag("--negative-control", flags.negative_control,
                  "inject one flipped arrow into replica 0");
  };

  CLI::App* classify = app.add_subcommand("classify", "environment diagnostics");
  CLI::App* check = app.add_subcommand("check", "path-wise coupling property suite");
  CLI::App* speed = app.add_subcommand("speed", "speed estimators");
  CLI::App* oracle = app.add_subcommand("oracle", "exact small-horizon laws");
  CLI::App* sweep = app.add_subcommand("sweep", "diagnostics/speeds over a grid");
  for (CLI::App* sub : {classify, check, speed, oracle, sweep}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : {classify, check, speed, oracle, sweep}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) flags.seed = seed_flag;
    if (sub->count("--replicas") > 0) flags.replicas = replicas_flag;
    if (sub->count("--horizon") > 0) flags.horizon = horizon_flag;
    if (sub->count("--guard") > 0) flags.guard = guard_flag;
    if (sub->count("--out") > 0) flags.out = out_flag;
    if (sub->count("--format") > 0) flags.format = format_flag;
  }

  try {
    const erw::ExperimentConfig cfg = resolve_config(flags);
    if (classify->parsed()) return cmd_classify(cfg);
    if (check->parsed()) return cmd_check(cfg);
    if (speed->parsed()) return cmd_speed(cfg);
    if (oracle->parsed()) return cmd_oracle(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
  } catch (const erw::InsufficientRegenerations& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInsufficientRegen;
  } catch (const erw::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
