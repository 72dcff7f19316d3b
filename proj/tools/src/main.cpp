// bandit_lab: command-line front end for the adaptive-sampling laboratory.
//
// Verbs:
//   thresholds       minimal pilot sizes and oracle gains per variance profile
//   inference-sweep  two-stage adaptive MSE vs uniform across pilot sizes
//   joint-compare    policy comparison on the joint inference/regret loss
//   rate-sweep       joint loss across horizons with log-log slopes
//   oracle           KKT solution of the oracle allocation problem
//   validate-config  parse and validate a config file, run nothing
//
// Output is CSV (UTF-8, LF, header row, 6 significant digits; --raw for full
// precision). Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "banditlab/design.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/oracle.hpp"

using banditlab::BanditInstance;
using banditlab::EstimatorKind;
using banditlab::ExperimentConfig;
using banditlab::PolicyKind;
using banditlab::PolicySpec;
using banditlab::VarianceProfile;
using nlohmann::json;

namespace {

// ------------------------------------------------------------- formatting

std::string fmt(double v, bool raw) {
  char buf[64];
  std::snprintf(buf, sizeof buf, raw ? "%.17g" : "%.6g", v);
  return buf;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

std::string join_sigmas(const std::vector<double>& xs, bool raw) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += fmt(xs[i], raw);
  }
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

// ------------------------------------------------------- config validation

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) ==
        allowed.end()) {
      fail("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double get_number(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

std::int64_t get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_seed(const json& j) {
  if (!(j.is_number_integer() && j.get<double>() >= 0)) {
    fail("seed must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<double> get_number_list(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(get_number(x, what + " entries"));
  return out;
}

std::vector<std::int64_t> get_int_list(const json& j,
                                       const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array");
  std::vector<std::int64_t> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(get_int(x, what + " entries"));
  return out;
}

// ----------------------------------------------------------- config schema

struct SweepSpec {
  std::vector<std::int64_t> pilot_rounds;
  std::vector<std::int64_t> horizons;
  std::vector<std::vector<double>> profiles;
  std::int64_t max_multiple = 500;  // thresholds scan N1 = 3K .. max_multiple*K
};

struct SolverSpec {
  double tol = 1e-12;
  int max_iter = 200;
};

struct Config {
  std::optional<BanditInstance> instance;
  std::optional<PolicySpec> policy;
  std::vector<PolicySpec> policies;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> reps;
  std::uint64_t seed = 0;
  double lambda = 0.5;
  bool lambda_given = false;
  std::optional<EstimatorKind> estimator;
  int threads = 0;  // 0 = default
  SweepSpec sweep;
  SolverSpec solver;
};

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "sample_mean") return EstimatorKind::SampleMean;
  if (name == "ht") return EstimatorKind::HT;
  if (name == "pcipw") return EstimatorKind::PCIPW;
  fail("unknown estimator '" + name + "'");
}

banditlab::AlgSpec parse_alg(const json& j) {
  banditlab::AlgSpec out;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "thompson") {
      out.kind = banditlab::AlgKind::ThompsonGaussian;
    } else if (name == "ucb1") {
      out.kind = banditlab::AlgKind::UCB1;
    } else {
      fail("unknown alg '" + name + "'");
    }
    return out;
  }
  if (!j.is_object()) fail("policy.alg must be a string or object");
  check_keys(j, "policy.alg", {"kind", "thompson_scale", "ucb_c"});
  if (!j.contains("kind")) fail("policy.alg.kind is required");
  out = parse_alg(j.at("kind"));
  if (j.contains("thompson_scale")) {
    out.thompson_scale = get_number(j.at("thompson_scale"),
                                    "policy.alg.thompson_scale");
  }
  if (j.contains("ucb_c")) {
    out.ucb_c = get_number(j.at("ucb_c"), "policy.alg.ucb_c");
  }
  return out;
}

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "uniform") return PolicyKind::Uniform;
  if (name == "two_stage_an") return PolicyKind::TwoStageAN;
  if (name == "oracle") return PolicyKind::OracleStatic;
  if (name == "sarp") return PolicyKind::SARP;
  if (name == "narp") return PolicyKind::NARP;
  if (name == "forcing_balance") {
    fail("policy 'forcing_balance' is a reserved baseline name "
         "(defined in external work, not implemented here)");
  }
  fail("unknown policy kind '" + name + "'");
}

PolicySpec parse_policy(const json& j, double default_lambda) {
  PolicySpec out;
  out.lambda = default_lambda;
  if (j.is_string()) {
    out.kind = parse_policy_kind(j.get<std::string>());
    return out;
  }
  if (!j.is_object()) fail("policy must be a string or object");
  check_keys(j, "policy",
             {"kind", "pilot_rounds", "c_x", "p0", "m0", "alpha", "lambda",
              "alg", "alg_sees_all_data"});
  if (!j.contains("kind")) fail("policy.kind is required");
  if (!j.at("kind").is_string()) fail("policy.kind must be a string");
  out.kind = parse_policy_kind(j.at("kind").get<std::string>());
  if (j.contains("pilot_rounds")) {
    out.pilot_rounds = get_int(j.at("pilot_rounds"), "policy.pilot_rounds");
  }
  if (j.contains("c_x")) out.c_x = get_number(j.at("c_x"), "policy.c_x");
  if (j.contains("p0")) out.p0 = get_number_list(j.at("p0"), "policy.p0");
  if (j.contains("m0")) out.m0 = get_int(j.at("m0"), "policy.m0");
  if (j.contains("alpha")) {
    out.alpha = get_number(j.at("alpha"), "policy.alpha");
  }
  if (j.contains("lambda")) {
    out.lambda = get_number(j.at("lambda"), "policy.lambda");
  }
  if (j.contains("alg")) out.alg = parse_alg(j.at("alg"));
  if (j.contains("alg_sees_all_data")) {
    if (!j.at("alg_sees_all_data").is_boolean()) {
      fail("policy.alg_sees_all_data must be a boolean");
    }
    out.alg_sees_all_data = j.at("alg_sees_all_data").get<bool>();
  }
  return out;
}

BanditInstance parse_instance(const json& j) {
  if (!j.is_object()) fail("instance must be an object");
  check_keys(j, "instance", {"means", "std_devs"});
  if (!j.contains("std_devs")) fail("instance.std_devs is required");
  BanditInstance out;
  out.std_devs = get_number_list(j.at("std_devs"), "instance.std_devs");
  if (j.contains("means")) {
    out.means = get_number_list(j.at("means"), "instance.means");
    if (out.means.size() != out.std_devs.size()) {
      fail("instance.means and instance.std_devs must have equal length");
    }
  } else {
    out.means.assign(out.std_devs.size(), 0.0);
  }
  out.validate();
  return out;
}

Config parse_config(const json& root) {
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "config",
             {"instance", "policy", "policies", "horizon", "reps", "seed",
              "lambda", "estimator", "threads", "sweep", "solver"});
  Config out;
  if (root.contains("lambda")) {
    out.lambda = get_number(root.at("lambda"), "lambda");
    out.lambda_given = true;
    if (!(out.lambda >= 0.0 && out.lambda <= 1.0)) {
      fail("lambda must lie in [0,1]");
    }
  }
  if (root.contains("instance")) {
    out.instance = parse_instance(root.at("instance"));
  }
  if (root.contains("policy")) {
    out.policy = parse_policy(root.at("policy"), out.lambda);
  }
  if (root.contains("policies")) {
    const json& arr = root.at("policies");
    if (!arr.is_array() || arr.empty()) {
      fail("policies must be a nonempty array");
    }
    for (const auto& p : arr) {
      out.policies.push_back(parse_policy(p, out.lambda));
    }
  }
  if (root.contains("horizon")) {
    out.horizon = get_int(root.at("horizon"), "horizon");
    if (*out.horizon < 1) fail("horizon must be >= 1");
  }
  if (root.contains("reps")) {
    out.reps = get_int(root.at("reps"), "reps");
    if (*out.reps < 1) fail("reps must be >= 1");
  }
  if (root.contains("seed")) out.seed = get_seed(root.at("seed"));
  if (root.contains("estimator")) {
    if (!root.at("estimator").is_string()) {
      fail("estimator must be a string");
    }
    out.estimator = parse_estimator(root.at("estimator").get<std::string>());
  }
  if (root.contains("threads")) {
    const std::int64_t t = get_int(root.at("threads"), "threads");
    if (t < 0 || t > 4096) fail("threads must lie in [0, 4096]");
    out.threads = static_cast<int>(t);
  }
  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    if (!sw.is_object()) fail("sweep must be an object");
    check_keys(sw, "sweep",
               {"pilot_rounds", "horizons", "profiles", "max_multiple"});
    if (sw.contains("pilot_rounds")) {
      out.sweep.pilot_rounds =
          get_int_list(sw.at("pilot_rounds"), "sweep.pilot_rounds");
    }
    if (sw.contains("horizons")) {
      out.sweep.horizons = get_int_list(sw.at("horizons"), "sweep.horizons");
      for (std::size_t i = 1; i < out.sweep.horizons.size(); ++i) {
        if (out.sweep.horizons[i] <= out.sweep.horizons[i - 1]) {
          fail("sweep.horizons must be strictly ascending");
        }
      }
    }
    if (sw.contains("profiles")) {
      const json& ps = sw.at("profiles");
      if (!ps.is_array() || ps.empty()) {
        fail("sweep.profiles must be a nonempty array");
      }
      for (const auto& p : ps) {
        if (p.is_array()) {
          out.sweep.profiles.push_back(
              get_number_list(p, "sweep.profiles entries"));
        } else if (p.is_object()) {
          check_keys(p, "sweep.profiles entry", {"sigmas"});
          if (!p.contains("sigmas")) {
            fail("sweep.profiles entries need a 'sigmas' array");
          }
          out.sweep.profiles.push_back(
              get_number_list(p.at("sigmas"), "sweep.profiles sigmas"));
        } else {
          fail("sweep.profiles entries must be arrays or {sigmas: [...]}");
        }
      }
    }
    if (sw.contains("max_multiple")) {
      out.sweep.max_multiple =
          get_int(sw.at("max_multiple"), "sweep.max_multiple");
      if (out.sweep.max_multiple < 3) fail("sweep.max_multiple must be >= 3");
    }
  }
  if (root.contains("solver")) {
    const json& so = root.at("solver");
    if (!so.is_object()) fail("solver must be an object");
    check_keys(so, "solver", {"tol", "max_iter"});
    if (so.contains("tol")) {
      out.solver.tol = get_number(so.at("tol"), "solver.tol");
      if (!(out.solver.tol > 0.0)) fail("solver.tol must be > 0");
    }
    if (so.contains("max_iter")) {
      const std::int64_t mi = get_int(so.at("max_iter"), "solver.max_iter");
      if (mi < 1 || mi > 1000000) fail("solver.max_iter must be >= 1");
      out.solver.max_iter = static_cast<int>(mi);
    }
  }
  return out;
}

const BanditInstance& need_instance(const Config& c) {
  if (!c.instance) fail("instance is required for this verb");
  return *c.instance;
}

std::int64_t need_horizon(const Config& c) {
  if (!c.horizon) fail("horizon is required for this verb");
  return *c.horizon;
}

std::int64_t need_reps(const Config& c) {
  if (!c.reps) fail("reps is required for this verb");
  return *c.reps;
}

void warn_lambda_endpoint(const Config& c) {
  if (c.lambda == 0.0 || c.lambda == 1.0) {
    std::cerr << "warning: lambda at an endpoint of [0,1] reduces the joint "
                 "loss to a single component; the oracle allocation problem "
                 "is undefined there\n";
  }
}

// ------------------------------------------------------------------- verbs

int run_thresholds(const Config& cfg, std::ostream& os, bool raw) {
  if (cfg.sweep.profiles.empty()) {
    fail("thresholds needs sweep.profiles");
  }
  CsvWriter csv(os);
  csv.row({"k", "sigma", "n1_min", "oracle_gain_pct", "error"});
  bool any_error = false;
  for (const auto& sigmas : cfg.sweep.profiles) {
    const std::string joined = join_sigmas(sigmas, raw);
    const std::string k_str = fmt_int(static_cast<std::int64_t>(sigmas.size()));
    try {
      VarianceProfile profile{sigmas};
      const banditlab::ThresholdReport report =
          banditlab::min_pilot_size(profile, cfg.sweep.max_multiple);
      csv.row({k_str, joined,
               report.n1_min ? fmt_int(*report.n1_min) : "none",
               fmt(report.oracle_gain_pct, raw), ""});
    } catch (const std::exception& e) {
      any_error = true;
      csv.row({k_str, joined, "", "", e.what()});
    }
  }
  return any_error ? 2 : 0;
}

int run_inference_sweep(const Config& cfg, std::ostream& os, bool raw) {
  if (cfg.sweep.pilot_rounds.empty()) {
    fail("inference-sweep needs sweep.pilot_rounds");
  }
  ExperimentConfig base;
  base.instance = need_instance(cfg);
  base.policy = cfg.policy.value_or(PolicySpec{});
  if (!cfg.policy) {
    base.policy.kind = PolicyKind::TwoStageAN;
  } else if (base.policy.kind != PolicyKind::TwoStageAN) {
    fail("inference-sweep needs a two_stage_an policy template");
  }
  base.horizon = need_horizon(cfg);
  base.reps = need_reps(cfg);
  base.base_seed = cfg.seed;
  base.lambda = cfg.lambda;
  base.estimator = cfg.estimator.value_or(EstimatorKind::PCIPW);
  base.want_regret = false;

  const banditlab::PilotSweepResult sweep =
      banditlab::pilot_sweep(base, cfg.sweep.pilot_rounds, cfg.threads);

  CsvWriter csv(os);
  csv.row({"row", "n1", "total_mse", "se_total_mse", "delta_u",
           "se_delta_paired", "se_delta_unpaired", "gain_pct"});
  for (const auto& row : sweep.rows) {
    csv.row({"adaptive", fmt_int(row.pilot_rounds),
             fmt(row.adaptive_mse, raw), fmt(row.adaptive_mse_se, raw),
             fmt(row.delta_u, raw), fmt(row.delta_u_se_paired, raw),
             fmt(row.delta_u_se_unpaired, raw), fmt(row.gain_pct, raw)});
  }
  csv.row({"uniform_mc", "", fmt(sweep.uniform_mse, raw),
           fmt(sweep.uniform_mse_se, raw), "", "", "", ""});
  csv.row({"uniform_closed", "", fmt(sweep.uniform_closed, raw), "", "", "",
           "", ""});
  csv.row({"neyman_closed", "", fmt(sweep.neyman_closed, raw), "", "", "",
           "", ""});
  return 0;
}

int run_joint_compare(const Config& cfg, std::ostream& os, bool raw) {
  if (cfg.policies.empty()) fail("joint-compare needs a policies list");
  if (!cfg.lambda_given) fail("joint-compare needs lambda");
  warn_lambda_endpoint(cfg);

  ExperimentConfig base;
  base.instance = need_instance(cfg);
  base.horizon = need_horizon(cfg);
  base.reps = need_reps(cfg);
  base.base_seed = cfg.seed;
  base.lambda = cfg.lambda;
  base.estimator = cfg.estimator.value_or(EstimatorKind::SampleMean);
  base.want_regret = true;

  struct Row {
    std::string name;
    banditlab::MetricsReport metrics;
  };
  std::vector<Row> rows;
  for (const PolicySpec& spec : cfg.policies) {
    ExperimentConfig run = base;
    run.policy = spec;
    rows.push_back(
        {banditlab::policy_name(spec.kind),
         banditlab::run_experiment(run, cfg.threads)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.metrics.joint_loss < b.metrics.joint_loss;
  });

  CsvWriter csv(os);
  csv.row({"policy", "sum_rmse", "se_sum_rmse", "avg_regret",
           "se_avg_regret", "joint_loss", "se_joint_loss"});
  for (const auto& row : rows) {
    csv.row({row.name, fmt(row.metrics.sum_rmse, raw),
             fmt(row.metrics.sum_rmse_se, raw),
             fmt(row.metrics.avg_regret, raw),
             fmt(row.metrics.avg_regret_se, raw),
             fmt(row.metrics.joint_loss, raw),
             fmt(row.metrics.joint_loss_se, raw)});
  }
  return 0;
}

int run_rate_sweep(const Config& cfg, std::ostream& os, bool raw) {
  if (cfg.policies.empty()) fail("rate-sweep needs a policies list");
  if (cfg.sweep.horizons.size() < 2) {
    fail("rate-sweep needs sweep.horizons with at least two values");
  }
  if (!cfg.lambda_given) fail("rate-sweep needs lambda");
  warn_lambda_endpoint(cfg);

  ExperimentConfig base;
  base.instance = need_instance(cfg);
  base.horizon = cfg.sweep.horizons.front();
  base.reps = need_reps(cfg);
  base.base_seed = cfg.seed;
  base.lambda = cfg.lambda;
  base.estimator = cfg.estimator.value_or(EstimatorKind::SampleMean);
  base.want_regret = true;

  const banditlab::HorizonSweepResult sweep = banditlab::horizon_sweep(
      base, cfg.policies, cfg.sweep.horizons, cfg.threads);

  CsvWriter csv(os);
  csv.row({"record", "policy", "n", "joint_loss", "se_joint_loss",
           "sum_rmse", "avg_regret", "slope_joint", "slope_sum_rmse",
           "slope_avg_regret"});
  for (const auto& row : sweep.rows) {
    csv.row({"data", banditlab::policy_name(row.policy),
             fmt_int(row.horizon), fmt(row.metrics.joint_loss, raw),
             fmt(row.metrics.joint_loss_se, raw),
             fmt(row.metrics.sum_rmse, raw),
             fmt(row.metrics.avg_regret, raw), "", "", ""});
  }
  for (const auto& slope : sweep.slopes) {
    csv.row({"slope", banditlab::policy_name(slope.policy), "", "", "", "",
             "", fmt(slope.joint, raw), fmt(slope.sum_rmse, raw),
             fmt(slope.avg_regret, raw)});
  }
  return 0;
}

int run_oracle(const Config& cfg, std::ostream& os, bool raw) {
  const BanditInstance& instance = need_instance(cfg);
  if (!cfg.lambda_given) fail("oracle needs lambda");

  CsvWriter csv(os);
  if (!cfg.sweep.horizons.empty()) {
    banditlab::JointProblem base = banditlab::joint_problem_from_instance(
        instance, cfg.lambda, cfg.sweep.horizons.front());
    const std::vector<banditlab::RatePoint> curve =
        banditlab::oracle_rate_curve(base, cfg.sweep.horizons, cfg.solver.tol,
                                     cfg.solver.max_iter);
    csv.row({"n", "objective_value", "p_star_best", "alpha_star",
             "kkt_residual"});
    const int best = banditlab::optimal_arm(instance);
    for (const auto& pt : curve) {
      csv.row({fmt_int(pt.horizon), fmt(pt.solution.objective_value, raw),
               fmt(pt.solution.p_star[static_cast<std::size_t>(best)], raw),
               fmt(pt.solution.alpha_star, raw),
               fmt(pt.solution.kkt_residual, raw)});
    }
    return 0;
  }

  const std::int64_t horizon = need_horizon(cfg);
  const banditlab::JointProblem problem =
      banditlab::joint_problem_from_instance(instance, cfg.lambda, horizon);
  const banditlab::OracleSolution sol =
      banditlab::solve_oracle(problem, cfg.solver.tol, cfg.solver.max_iter);
  csv.row({"arm", "sigma", "delta", "p_star", "alpha_star",
           "objective_value", "kkt_residual"});
  for (int i = 0; i < problem.num_arms(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    csv.row({fmt_int(i), fmt(problem.sigmas[ii], raw),
             fmt(problem.deltas[ii], raw), fmt(sol.p_star[ii], raw),
             fmt(sol.alpha_star, raw), fmt(sol.objective_value, raw),
             fmt(sol.kkt_residual, raw)});
  }
  return 0;
}

int run_validate(const Config& cfg, const std::string& path,
                 std::ostream& os) {
  // Structural checks already happened in parse_config. Deep checks follow
  // whenever the pieces needed for them are present. A two-stage policy that
  // leaves pilot_rounds unset is a sweep template: the pilot sizes it will
  // actually run come from sweep.pilot_rounds, so validate those instead.
  auto effective_specs = [&](const PolicySpec& spec) {
    std::vector<PolicySpec> out;
    if (spec.kind == PolicyKind::TwoStageAN && spec.pilot_rounds == 0 &&
        !cfg.sweep.pilot_rounds.empty()) {
      for (const std::int64_t n1 : cfg.sweep.pilot_rounds) {
        PolicySpec filled = spec;
        filled.pilot_rounds = n1;
        out.push_back(filled);
      }
    } else {
      out.push_back(spec);
    }
    return out;
  };
  auto deep_check = [&](const PolicySpec& spec) {
    if (cfg.instance && cfg.horizon) {
      for (const auto& s : effective_specs(spec)) {
        banditlab::make_policy(s, *cfg.instance, *cfg.horizon);
      }
    }
  };
  if (cfg.policy) deep_check(*cfg.policy);
  for (const auto& spec : cfg.policies) deep_check(spec);
  if (cfg.instance && cfg.horizon && cfg.reps && cfg.policy) {
    for (const auto& s : effective_specs(*cfg.policy)) {
      ExperimentConfig run;
      run.instance = *cfg.instance;
      run.policy = s;
      run.horizon = *cfg.horizon;
      run.reps = *cfg.reps;
      run.base_seed = cfg.seed;
      run.lambda = cfg.lambda;
      run.estimator = cfg.estimator.value_or(EstimatorKind::SampleMean);
      run.want_regret = false;
      run.validate();
    }
  }
  for (const auto& sigmas : cfg.sweep.profiles) {
    VarianceProfile{sigmas}.validate();
  }
  os << "ok: " << path << "\n";
  return 0;
}

// ------------------------------------------------------------------ driver

void apply_override(json& root, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail("--set expects key=value, got '" + kv + "'");
  }
  const std::string path = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);

  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) fail("--set path has an empty segment: '" + path + "'");
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) {
      (*node)[key] = json::object();
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

int dispatch(const std::string& verb, const Config& cfg,
             const std::string& config_path, std::ostream& os, bool raw) {
  if (verb == "thresholds") return run_thresholds(cfg, os, raw);
  if (verb == "inference-sweep") return run_inference_sweep(cfg, os, raw);
  if (verb == "joint-compare") return run_joint_compare(cfg, os, raw);
  if (verb == "rate-sweep") return run_rate_sweep(cfg, os, raw);
  if (verb == "oracle") return run_oracle(cfg, os, raw);
  if (verb == "validate-config") return run_validate(cfg, config_path, os);
  fail("unknown verb '" + verb + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-sampling simulation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  bool raw = false;

  const std::vector<std::string> verbs = {
      "thresholds",    "inference-sweep", "joint-compare",
      "rate-sweep",    "oracle",          "validate-config"};
  for (const auto& v : verbs) {
    CLI::App* sub = app.add_subcommand(v);
    sub->add_option("-c,--config", config_path, "Config file (JSON)")
        ->required();
    sub->add_option("-o,--output", output_path,
                    "Output CSV path (default stdout)");
    sub->add_option("--set", overrides,
                    "Override a config entry, e.g. --set lambda=0.25 or "
                    "--set policy.kind=narp (repeatable)");
    sub->add_option("--seed", seed_override, "Override the base seed");
    sub->add_option("--threads", threads_override,
                    "Worker count (0 = default; env BANDIT_LAB_THREADS)");
    sub->add_flag("--raw", raw, "Full-precision floats instead of 6 digits");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every real usage error is a config error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string verb = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "config error: cannot open '" << config_path << "'\n";
      return 2;
    }
    json root = json::parse(in, nullptr, false);
    if (root.is_discarded()) {
      std::cerr << "config error: '" << config_path
                << "' is not valid JSON\n";
      return 2;
    }
    for (const auto& kv : overrides) apply_override(root, kv);

    Config cfg = parse_config(root);
    if (seed_override) cfg.seed = *seed_override;
    if (threads_override) {
      if (*threads_override < 0 || *threads_override > 4096) {
        fail("--threads must lie in [0, 4096]");
      }
      cfg.threads = *threads_override;
    }

    std::ofstream file_out;
    if (!output_path.empty()) {
      file_out.open(output_path, std::ios::binary);
      if (!file_out) {
        std::cerr << "config error: cannot open output '" << output_path
                  << "'\n";
        return 2;
      }
    }
    std::ostream& os = output_path.empty() ? std::cout : file_out;
    return dispatch(verb, cfg, config_path, os, raw);
  } catch (const banditlab::SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
