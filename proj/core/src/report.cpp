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

#include "erw/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace erw {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string probs_field(const std::vector<double>& probs) {
  std::string out;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (i > 0) out += ' ';
    out += csv_double(probs[i]);
  }
  return out;
}

ordered_json ci_json(const ConfidenceInterval& ci) {
  return ordered_json{{"lo", ci.lo}, {"hi", ci.hi}};
}

ordered_json estimate_json(const SpeedEstimate& est) {
  ordered_json j;
  j["value"] = est.value;
  j["ci95"] = ci_json(est.ci95);
  j["ci99"] = ci_json(est.ci99);
  j["method"] = est.method;
  j["block_count"] = est.block_count;
  j["replica_count"] = est.replica_count;
  j["zero_speed_caveat"] = est.zero_speed_caveat;
  return j;
}

ordered_json sensitivity_json(const std::vector<GuardSensitivityRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    arr.push_back(ordered_json{{"guard", row.guard},
                               {"value", row.value},
                               {"ci95", ci_json(row.ci95)},
                               {"block_count", row.block_count}});
  }
  return arr;
}

std::string estimate_csv_row(const std::string& label, const SpeedEstimate& est) {
  std::ostringstream os;
  os << label << ',' << csv_double(est.value) << ',' << csv_double(est.ci95.lo)
     << ',' << csv_double(est.ci95.hi) << ',' << csv_double(est.ci99.lo) << ','
     << csv_double(est.ci99.hi) << ',' << est.method << ',' << est.block_count
     << ',' << est.replica_count << ',' << (est.zero_speed_caveat ? 1 : 0)
     << '\n';
  return os.str();
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string classify_report_json(const EnvSpec& spec, const EnvDiagnostics& d) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["form"] = to_string(spec.form);
  j["probs"] = spec.probs;
  if (d.delta) j["delta"] = *d.delta;
  if (d.pbar) j["pbar"] = *d.pbar;
  if (d.theta) j["theta"] = *d.theta;
  j["classification"] = to_string(d.classification);
  j["boundary"] = d.boundary;
  j["sufficient_only"] = d.sufficient_only;
  return dump(j);
}

std::string check_report_csv(const CheckSuiteResult& result, uint64_t seed) {
  std::ostringstream os;
  os << "check,samples,violations,replay_seed,replay_replica\n";
  const std::string replay_seed = std::to_string(seed);
  const std::string replay_replica =
      result.first_failing_replica ? std::to_string(*result.first_failing_replica) : "";
  auto row = [&](const std::string& name, int64_t count) {
    os << name << ',' << result.samples << ',' << count << ','
       << (count > 0 ? replay_seed : "") << ',' << (count > 0 ? replay_replica : "")
       << '\n';
  };
  row("prefix_domination", result.totals.prefix_domination_violations);
  row("hitting_order", result.totals.hitting_order_violations);
  row("running_max", result.totals.running_max_violations);
  row("running_min", result.totals.running_min_violations);
  row("visit_count", result.totals.visit_count_violations);
  row("regen_set_inclusion", result.totals.inclusion_violations);
  row("block_duration", result.totals.duration_violations);
  row("zero_indicator", result.totals.indicator_violations);
  os << "exact_atom_order," << 1 << ',' << result.exact_atom_violations << ",,\n";
  return os.str();
}

std::string check_report_json(const CheckSuiteResult& result, uint64_t seed) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["samples"] = result.samples;
  j["violations"] = ordered_json{
      {"prefix_domination", result.totals.prefix_domination_violations},
      {"hitting_order", result.totals.hitting_order_violations},
      {"running_max", result.totals.running_max_violations},
      {"running_min", result.totals.running_min_violations},
      {"visit_count", result.totals.visit_count_violations},
      {"regen_set_inclusion", result.totals.inclusion_violations},
      {"block_duration", result.totals.duration_violations},
      {"zero_indicator", result.totals.indicator_violations},
      {"exact_atom_order", result.exact_atom_violations}};
  j["exact_horizon"] = result.exact_horizon;
  j["ok"] = result.ok();
  if (result.first_failing_replica) {
    j["replay"] = ordered_json{{"seed", seed},
                               {"replica", *result.first_failing_replica}};
  }
  return dump(j);
}

std::string speed_report_json(const ExperimentConfig& cfg, const SpeedBundle& bundle) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = cfg.seed;
  j["replicas"] = cfg.replicas;
  j["horizon"] = cfg.horizon;
  j["guard"] = cfg.guard;
  if (bundle.naive) j["naive"] = estimate_json(*bundle.naive);
  if (bundle.regen) {
    j["regeneration"] = estimate_json(bundle.regen->estimate);
    j["guard_sensitivity"] = sensitivity_json(bundle.regen->sensitivity);
  }
  if (bundle.paired) {
    j["paired"] = ordered_json{
        {"p_speed", estimate_json(bundle.paired->p_speed)},
        {"q_speed", estimate_json(bundle.paired->q_speed)},
        {"diff", estimate_json(bundle.paired->paired_diff)},
        {"duration_violations", bundle.paired->duration_violations},
        {"inclusion_violations", bundle.paired->inclusion_violations},
        {"diff_guard_sensitivity", sensitivity_json(bundle.paired->diff_sensitivity)}};
  }
  if (bundle.regen_prob) {
    const auto& rp = *bundle.regen_prob;
    ordered_json p{{"replicas", rp.replicas},
                   {"eps_p", rp.eps_p},
                   {"eps_p_ci95", ci_json(rp.eps_p_ci95)},
                   {"eps_p_ci99", ci_json(rp.eps_p_ci99)},
                   {"strict_positive_p", rp.strict_positive_p}};
    if (rp.eps_q) {
      p["eps_q"] = *rp.eps_q;
      p["eps_q_ci95"] = ci_json(rp.eps_q_ci95);
      p["diff"] = rp.diff;
      p["diff_ci95"] = ci_json(rp.diff_ci95);
      p["diff_ci99"] = ci_json(rp.diff_ci99);
      p["indicator_violations"] = rp.indicator_violations;
      p["strict_positive_q"] = *rp.strict_positive_q;
    }
    j["regen_probability"] = p;
  }
  return dump(j);
}

std::string speed_report_csv(const SpeedBundle& bundle) {
  std::ostringstream os;
  os << "estimate,value,ci95_lo,ci95_hi,ci99_lo,ci99_hi,method,blocks,replicas,zero_speed_caveat\n";
  if (bundle.naive) os << estimate_csv_row("naive", *bundle.naive);
  if (bundle.regen) os << estimate_csv_row("regeneration", bundle.regen->estimate);
  if (bundle.paired) {
    os << estimate_csv_row("p_speed", bundle.paired->p_speed);
    os << estimate_csv_row("q_speed", bundle.paired->q_speed);
    os << estimate_csv_row("paired_diff", bundle.paired->paired_diff);
  }
  return os.str();
}

std::string oracle_paths_json(const ExperimentConfig& cfg,
                              const ExactPathDistribution& dist,
                              std::optional<double> query_result) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["horizon"] = dist.horizon;
  j["total_mass"] = total_mass(dist);
  if (cfg.oracle.hit_level) {
    j["query"] = ordered_json{
        {"hit_level", *cfg.oracle.hit_level},
        {"by_time", cfg.oracle.by_time ? *cfg.oracle.by_time : dist.horizon}};
    if (query_result) j["query"]["probability"] = *query_result;
  }
  ordered_json paths = ordered_json::array();
  for (uint32_t mask = 0; mask < dist.prob.size(); ++mask) {
    if (dist.prob[mask] == 0.0) continue;
    const WalkPath path = decode_path(mask, dist.horizon);
    paths.push_back(ordered_json{{"positions", path.positions},
                                 {"probability", dist.prob[mask]}});
  }
  j["paths"] = paths;
  return dump(j);
}

std::string oracle_joint_json(const ExperimentConfig& cfg,
                              const ExactCoupledDistribution& dist,
                              const AtomCheckReport& order) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["horizon"] = dist.horizon;
  j["atoms"] = static_cast<int64_t>(dist.atoms.size());
  int64_t diagonal = 0;
  KahanSum mass;
  for (const auto& atom : dist.atoms) {
    mass.add(atom.prob);
    if (atom.l_mask == atom.r_mask) ++diagonal;
  }
  j["total_mass"] = mass.value();
  j["diagonal_atoms"] = diagonal;
  j["order_check"] = ordered_json{{"atoms", order.atoms},
                                  {"violating_atoms", order.violating_atoms},
                                  {"violating_mass", order.violating_mass}};
  (void)cfg;
  return dump(j);
}

std::string dominance_report_json(const ExperimentConfig& cfg,
                                  const DominanceReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["ok"] = report.ok;
  j["worst_violation"] = report.worst_violation;
  j["rows"] = static_cast<int64_t>(report.rows.size());
  double min_gap = report.rows.empty() ? 0.0 : report.rows.front().gap;
  for (const auto& row : report.rows) min_gap = std::min(min_gap, row.gap);
  j["min_gap"] = min_gap;
  (void)cfg;
  return dump(j);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "probs,form,delta,pbar,theta,classification,speed,speed_ci95_lo,"
        "speed_ci95_hi,speed_ci99_lo,speed_ci99_hi,error\n";
  for (const auto& row : rows) {
    os << '"' << probs_field(row.probs) << '"' << ',' << to_string(row.form) << ',';
    os << (row.delta ? csv_double(*row.delta) : "") << ',';
    os << (row.pbar ? csv_double(*row.pbar) : "") << ',';
    os << (row.theta ? csv_double(*row.theta) : "") << ',';
    os << row.classification << ',';
    if (row.speed) {
      os << csv_double(row.speed->value) << ',' << csv_double(row.speed->ci95.lo)
         << ',' << csv_double(row.speed->ci95.hi) << ','
         << csv_double(row.speed->ci99.lo) << ',' << csv_double(row.speed->ci99.hi);
    } else {
      os << ",,,,";
    }
    os << ',' << row.error << '\n';
  }
  return os.str();
}

}  // namespace erw
