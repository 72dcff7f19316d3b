// Acceptance suite for the adaptive-sampling laboratory.
//
// Runs ten end-to-end checks against reference values and structural
// guarantees, prints exactly one PASS/FAIL line per criterion, and exits
// nonzero if any criterion fails. Every stochastic check pins its seed, so
// the suite is deterministic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "banditlab/design.hpp"
#include "banditlab/estimators.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/instance.hpp"
#include "banditlab/oracle.hpp"
#include "banditlab/policies.hpp"
#include "banditlab/rng.hpp"

namespace {

using banditlab::BanditInstance;
using banditlab::EstimatorKind;
using banditlab::ExperimentConfig;
using banditlab::JointProblem;
using banditlab::MetricsReport;
using banditlab::PolicyKind;
using banditlab::PolicySpec;
using banditlab::TwoStageDesign;
using banditlab::VarianceProfile;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

BanditInstance staircase8() {
  return BanditInstance{{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5},
                        {1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0}};
}

PolicySpec adaptive_policy(PolicyKind kind) {
  PolicySpec spec;
  spec.kind = kind;
  spec.lambda = 0.5;
  spec.alg.kind = banditlab::AlgKind::ThompsonGaussian;
  spec.alg.thompson_scale = 2.5;  // matches the instance's mean sigma
  return spec;
}

// ---------------------------------------------------------------- criteria

Outcome criterion_thresholds() {
  const auto t0 = Clock::now();
  struct Row {
    std::vector<double> sigmas;
    std::int64_t n1;
    double gain;
  };
  const std::vector<Row> rows = {
      {{1, 1, 1, 5}, 12, 42.86},
      {{3, 3, 3, 4}, 260, 1.74},
      {{1, 1, 2, 2, 3, 6}, 24, 31.82},
      {{1, 1, 1, 3, 3, 3}, 42, 20.00},
      {{1, 1, 2, 2, 3, 3, 4, 4, 5, 5}, 80, 18.18},
      {{1, 1, 1, 1, 1, 1, 1, 1, 1, 10}, 30, 66.88},
  };
  bool pass = true;
  std::ostringstream detail;
  for (const auto& row : rows) {
    const auto report = banditlab::min_pilot_size(VarianceProfile{row.sigmas});
    const bool n1_ok = report.n1_min && *report.n1_min == row.n1;
    const bool gain_ok = std::abs(report.oracle_gain_pct - row.gain) <= 0.005;
    if (!n1_ok || !gain_ok) {
      pass = false;
      detail << " [K=" << row.sigmas.size() << " got n1="
             << (report.n1_min ? std::to_string(*report.n1_min) : "none")
             << " gain=" << fmt(report.oracle_gain_pct) << " want " << row.n1
             << "/" << fmt(row.gain) << "]";
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 1.0) {
    pass = false;
    detail << " [took " << fmt(dt) << " s, limit 1 s]";
  }
  if (pass) {
    detail << "six profiles, minimal pilot sizes {12,260,24,42,80,30} and "
              "gains to 2 decimals, "
           << fmt(dt) << " s";
  }
  return {pass, detail.str()};
}

Outcome criterion_penalty_factor() {
  bool pass = true;
  std::ostringstream detail;
  const double b2 = banditlab::beta_nu(2.0);
  const double b3 = banditlab::beta_nu(3.0);
  const double pi = 3.14159265358979323846;
  if (std::abs(b2 - pi / 2.0) > 1e-12) {
    pass = false;
    detail << " [beta(2)=" << fmt(b2) << " want pi/2]";
  }
  if (std::abs(b3 - 4.0 / pi) > 1e-12) {
    pass = false;
    detail << " [beta(3)=" << fmt(b3) << " want 4/pi]";
  }
  double prev = banditlab::beta_nu(2.0);
  for (int nu = 3; nu <= 200; ++nu) {
    const double cur = banditlab::beta_nu(static_cast<double>(nu));
    if (!(cur < prev) || !(cur > 1.0)) {
      pass = false;
      detail << " [not strictly decreasing toward 1 at nu=" << nu << "]";
      break;
    }
    prev = cur;
  }
  if (pass) {
    detail << "beta(2)=pi/2, beta(3)=4/pi to 1e-12; strictly decreasing on "
              "nu in [2,200], all above 1";
  }
  return {pass, detail.str()};
}

Outcome criterion_pilot_mse_table() {
  const auto t0 = Clock::now();
  ExperimentConfig base;
  base.instance = BanditInstance{{0, 0, 0, 0}, {1, 1, 1, 5}};
  base.policy.kind = PolicyKind::TwoStageAN;
  base.horizon = 500;
  base.reps = 2000;
  base.base_seed = 9001;
  base.estimator = EstimatorKind::PCIPW;
  base.want_regret = false;

  const auto sweep =
      banditlab::pilot_sweep(base, {8, 12, 16, 20, 24, 28}, 1);

  const std::vector<double> want = {0.196, 0.177, 0.157, 0.157, 0.151};
  bool pass = true;
  std::ostringstream detail;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {  // skip n1 = 8
    const double got = sweep.rows[i].adaptive_mse;
    if (std::abs(got - want[i - 1]) > 0.015) {
      pass = false;
      detail << " [n1=" << sweep.rows[i].pilot_rounds << " mse=" << fmt(got)
             << " want " << fmt(want[i - 1]) << " +-0.015]";
    }
    if (!(sweep.rows[i].delta_u < 0.0)) {
      pass = false;
      detail << " [n1=" << sweep.rows[i].pilot_rounds
             << " does not beat uniform]";
    }
  }
  if (!(sweep.rows[0].delta_u > 0.0)) {
    pass = false;
    detail << " [n1=8 should lose to uniform, delta_u="
           << fmt(sweep.rows[0].delta_u) << "]";
  }
  const double dt = seconds_since(t0);
  if (dt >= 120.0) {
    pass = false;
    detail << " [took " << fmt(dt) << " s, limit 120 s]";
  }
  if (pass) {
    detail << "four-arm profile (1,1,1,5), N=500, 2000 reps: MSE at n1 in "
              "{12..28} within 0.015 of reference; two-pull pilot loses, "
              "all larger pilots win; "
           << fmt(dt) << " s";
  }
  return {pass, detail.str()};
}

Outcome criterion_crossover() {
  ExperimentConfig base;
  base.instance.std_devs = {1, 1, 2, 2, 3, 3, 4, 4, 5, 5};
  base.instance.means.assign(10, 0.0);
  base.policy.kind = PolicyKind::TwoStageAN;
  base.horizon = 2000;
  base.reps = 2000;
  base.base_seed = 9002;
  base.estimator = EstimatorKind::PCIPW;
  base.want_regret = false;

  const auto sweep = banditlab::pilot_sweep(
      base, {40, 50, 60, 70, 80, 90, 100, 110, 120}, 1);

  std::int64_t first_positive = -1;
  for (const auto& row : sweep.rows) {
    if (row.gain_pct > 0.0) {
      first_positive = row.pilot_rounds;
      break;
    }
  }
  bool pass = first_positive >= 60 && first_positive <= 100;
  std::ostringstream detail;
  if (!pass) {
    detail << " [first pilot size with positive gain: "
           << (first_positive < 0 ? std::string("none")
                                  : std::to_string(first_positive))
           << ", want within [60,100]]";
  } else {
    detail << "ten-arm staircase, N=2000, 2000 reps: gain vs uniform turns "
              "positive at n1="
           << first_positive << " (inside [60,100])";
  }
  return {pass, detail.str()};
}

Outcome criterion_joint_table() {
  const auto t0 = Clock::now();
  ExperimentConfig base;
  base.instance = staircase8();
  base.horizon = 1000;
  base.reps = 1000;
  base.base_seed = 9003;
  base.lambda = 0.5;
  base.estimator = EstimatorKind::SampleMean;
  base.want_regret = true;

  struct Row {
    const char* name;
    PolicySpec spec;
    double want;
  };
  std::vector<Row> rows;
  {
    PolicySpec oracle;
    oracle.kind = PolicyKind::OracleStatic;
    oracle.lambda = 0.5;
    rows.push_back({"oracle", oracle, 1.38});
    rows.push_back({"narp", adaptive_policy(PolicyKind::NARP), 1.58});
    PolicySpec uniform;
    rows.push_back({"uniform", uniform, 1.77});
    rows.push_back({"sarp", adaptive_policy(PolicyKind::SARP), 1.78});
  }

  bool pass = true;
  std::ostringstream detail;
  std::vector<double> joint(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ExperimentConfig run = base;
    run.policy = rows[i].spec;
    joint[i] = banditlab::run_experiment(run, 1).joint_loss;
    if (std::abs(joint[i] - rows[i].want) > 0.15) {
      pass = false;
      detail << " [" << rows[i].name << " joint=" << fmt(joint[i]) << " want "
             << fmt(rows[i].want) << " +-0.15]";
    }
  }
  // Ordering: oracle < narp < both uniform and sarp.
  if (!(joint[0] < joint[1] && joint[1] < joint[2] && joint[1] < joint[3])) {
    pass = false;
    detail << " [ordering violated: oracle=" << fmt(joint[0])
           << " narp=" << fmt(joint[1]) << " uniform=" << fmt(joint[2])
           << " sarp=" << fmt(joint[3]) << "]";
  }
  const double dt = seconds_since(t0);
  if (dt >= 300.0) {
    pass = false;
    detail << " [took " << fmt(dt) << " s, limit 300 s]";
  }
  if (pass) {
    detail << "eight-arm staircase, N=1000, 1000 reps, lambda=0.5: joint "
              "losses oracle="
           << fmt(joint[0]) << " narp=" << fmt(joint[1])
           << " uniform=" << fmt(joint[2]) << " sarp=" << fmt(joint[3])
           << ", all within 0.15 of reference, ordering holds; " << fmt(dt)
           << " s";
  }
  return {pass, detail.str()};
}

Outcome criterion_rate_slopes() {
  ExperimentConfig base;
  base.instance = staircase8();
  base.horizon = 500;
  base.reps = 500;
  base.base_seed = 9004;
  base.lambda = 0.5;
  base.estimator = EstimatorKind::SampleMean;
  base.want_regret = true;

  std::vector<PolicySpec> policies;
  {
    PolicySpec oracle;
    oracle.kind = PolicyKind::OracleStatic;
    oracle.lambda = 0.5;
    policies.push_back(oracle);
    policies.push_back(adaptive_policy(PolicyKind::SARP));
    policies.push_back(adaptive_policy(PolicyKind::NARP));
    PolicySpec uniform;
    policies.push_back(uniform);
  }
  const std::vector<std::int64_t> grid = {500, 1000, 2000, 5000, 10000};
  const auto sweep = banditlab::horizon_sweep(base, policies, grid, 1);

  bool pass = true;
  std::ostringstream detail;
  std::ostringstream got;
  for (const auto& slope : sweep.slopes) {
    const std::string name = banditlab::policy_name(slope.policy);
    if (slope.policy == PolicyKind::Uniform) {
      got << " uniform(regret)=" << fmt(slope.avg_regret);
      if (!(std::abs(slope.avg_regret) < 0.05)) {
        pass = false;
        detail << " [uniform regret slope " << fmt(slope.avg_regret)
               << ", want |slope| < 0.05]";
      }
      continue;
    }
    got << " " << name << "=" << fmt(slope.joint);
    if (!(slope.joint >= -0.45 && slope.joint <= -0.20)) {
      pass = false;
      detail << " [" << name << " joint slope " << fmt(slope.joint)
             << " outside [-0.45,-0.20]]";
    }
  }
  if (pass) {
    detail << "joint-loss log-log slopes over N in {500..10000}:" << got.str()
           << " (adaptive targets -1/3, uniform regret flat)";
  }
  return {pass, detail.str()};
}

Outcome criterion_oracle_solver() {
  bool pass = true;
  std::ostringstream detail;

  // KKT certification on the eight-arm staircase problem.
  const JointProblem problem = banditlab::joint_problem_from_instance(
      staircase8(), 0.5, 1000);
  const auto sol = banditlab::solve_oracle(problem);
  double sum_p = 0.0;
  for (double p : sol.p_star) sum_p += p;
  if (!(sol.kkt_residual <= 1e-8)) {
    pass = false;
    detail << " [kkt residual " << fmt(sol.kkt_residual) << " > 1e-8]";
  }
  if (!(std::abs(sum_p - 1.0) <= 1e-12)) {
    pass = false;
    detail << " [sum p - 1 = " << fmt(sum_p - 1.0) << " > 1e-12]";
  }

  // Brute-force agreement on a two-arm problem via golden-section search.
  JointProblem two;
  two.sigmas = {1.0, 2.0};
  two.deltas = {0.0, 1.0};
  two.lambda = 0.3;
  two.horizon = 1000;
  const auto sol2 = banditlab::solve_oracle(two);
  {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 1e-9, b = 1.0 - 1e-9;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    auto value = [&](double p) {
      return banditlab::joint_objective(two, {p, 1.0 - p});
    };
    double fc = value(c), fd = value(d);
    for (int it = 0; it < 200; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = value(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = value(d);
      }
    }
    const double brute = 0.5 * (a + b);
    if (!(std::abs(sol2.p_star[0] - brute) <= 1e-6)) {
      pass = false;
      detail << " [two-arm solver p=" << fmt(sol2.p_star[0])
             << " vs golden-section " << fmt(brute) << "]";
    }
  }

  // Asymptotic shares: suboptimal p_i ~ (lambda sigma_i / (2 (1-lambda)
  // Delta_i))^(2/3) N^(-1/3) at large N.
  JointProblem big;
  big.sigmas = {1.0, 2.0, 3.0};
  big.deltas = {1.0, 2.0, 0.0};
  big.lambda = 0.4;
  big.horizon = 1000000;
  const auto sol3 = banditlab::solve_oracle(big);
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double predicted =
        std::pow(big.lambda * big.sigmas[ii] /
                     (2.0 * (1.0 - big.lambda) * big.deltas[ii]),
                 2.0 / 3.0) /
        std::cbrt(static_cast<double>(big.horizon));
    if (!(std::abs(sol3.p_star[ii] / predicted - 1.0) <= 0.05)) {
      pass = false;
      detail << " [asymptotic share arm " << i << ": " << fmt(sol3.p_star[ii])
             << " vs " << fmt(predicted) << "]";
    }
  }

  if (pass) {
    detail << "kkt residual " << fmt(sol.kkt_residual)
           << ", |sum p - 1| = " << fmt(std::abs(sum_p - 1.0))
           << ", two-arm brute-force match to 1e-6, asymptotic shares "
              "within 5% at N=1e6";
  }
  return {pass, detail.str()};
}

Outcome criterion_estimators() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  ExperimentConfig cfg;
  cfg.instance = BanditInstance{{0.0, 1.0}, {1.0, 2.0}};
  cfg.policy.kind = PolicyKind::TwoStageAN;
  cfg.policy.pilot_rounds = 10;
  cfg.horizon = 50;
  cfg.reps = 100000;
  cfg.base_seed = 9005;
  cfg.want_regret = false;

  // Unbiasedness over 1e5 replications, both weighted estimators.
  for (EstimatorKind kind : {EstimatorKind::PCIPW, EstimatorKind::HT}) {
    cfg.estimator = kind;
    std::vector<double> err_mean(2, 0.0), err_m2(2, 0.0);
    for (std::int64_t r = 0; r < cfg.reps; ++r) {
      const auto rep = banditlab::run_replication(cfg, static_cast<std::uint64_t>(r));
      for (int i = 0; i < 2; ++i) {
        const double e =
            rep.estimates.estimates[static_cast<std::size_t>(i)] -
            cfg.instance.means[static_cast<std::size_t>(i)];
        const double d = e - err_mean[static_cast<std::size_t>(i)];
        err_mean[static_cast<std::size_t>(i)] += d / static_cast<double>(r + 1);
        err_m2[static_cast<std::size_t>(i)] +=
            d * (e - err_mean[static_cast<std::size_t>(i)]);
      }
    }
    for (int i = 0; i < 2; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double se = std::sqrt(
          err_m2[ii] / static_cast<double>(cfg.reps - 1) /
          static_cast<double>(cfg.reps));
      if (!(std::abs(err_mean[ii]) <= 3.0 * se)) {
        pass = false;
        detail << " [" << banditlab::estimator_name(kind) << " arm " << i
               << " bias " << fmt(err_mean[ii]) << " vs 3se=" << fmt(3.0 * se)
               << "]";
      }
    }
  }

  // Decomposition totals against an independent direct Monte-Carlo MSE.
  TwoStageDesign design;
  design.pilot_rounds = 10;
  design.horizon = 50;
  const std::int64_t dec_reps = 20000;
  for (EstimatorKind kind : {EstimatorKind::PCIPW, EstimatorKind::HT}) {
    const auto dec = banditlab::mse_decomposition(cfg.instance, design, kind,
                                                  dec_reps, 9105);
    double dec_total = 0.0, dec_se = 0.0, gap_worst = 0.0;
    for (const auto& arm : dec.arms) {
      dec_total += arm.pilot_term.value + arm.sampling_term.value +
                   arm.shift_term.value;
      dec_se += arm.mse.se;
      gap_worst = std::max(
          gap_worst, std::abs(arm.identity_gap.value) -
                         3.0 * arm.identity_gap.se);
      if (kind == EstimatorKind::HT && arm.shift_term.value != 0.0) {
        pass = false;
        detail << " [ht shift term nonzero]";
      }
    }
    if (gap_worst > 1e-12) {
      pass = false;
      detail << " [" << banditlab::estimator_name(kind)
             << " per-arm identity gap beyond 3se]";
    }
    cfg.estimator = kind;
    ExperimentConfig direct = cfg;
    direct.reps = dec_reps;
    direct.base_seed = 9205;
    const MetricsReport mc = banditlab::run_experiment(direct, 1);
    const double tol = 3.0 * (dec_se + mc.total_mse_se);
    if (!(std::abs(dec_total - mc.total_mse) <= tol)) {
      pass = false;
      detail << " [" << banditlab::estimator_name(kind) << " decomposition "
             << fmt(dec_total) << " vs direct " << fmt(mc.total_mse)
             << " beyond " << fmt(tol) << "]";
    }
  }

  if (pass) {
    detail << "pcipw and ht per-arm bias within 3se over 1e5 reps; "
              "decomposition totals match direct MC within 3 combined se; "
           << fmt(seconds_since(t0)) << " s";
  }
  return {pass, detail.str()};
}

Outcome criterion_narp_floor() {
  ExperimentConfig cfg;
  cfg.instance = staircase8();
  cfg.policy = adaptive_policy(PolicyKind::NARP);  // m0=2, alpha=1
  cfg.horizon = 4000;
  cfg.reps = 100;
  cfg.base_seed = 9006;
  cfg.want_regret = true;

  const double C = 8.0;
  double worst_margin = 1e300;
  bool pass = true;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto rep = banditlab::run_replication(cfg, r);
    std::vector<std::int64_t> counts(8, 0);
    for (const auto& rec : rep.history.records) {
      ++counts[static_cast<std::size_t>(rec.arm)];
      if (rec.t % 250 == 0) {
        const auto min_count = *std::min_element(counts.begin(), counts.end());
        const double margin = static_cast<double>(min_count) -
                              (std::sqrt(static_cast<double>(rec.t)) - C);
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0.0) pass = false;
      }
    }
  }
  std::ostringstream detail;
  if (pass) {
    detail << "min arm count >= sqrt(t) - 8 at every 250-round checkpoint "
              "across 100 seeds (worst slack "
           << fmt(worst_margin) << ")";
  } else {
    detail << " [floor violated; worst slack " << fmt(worst_margin) << "]";
  }
  return {pass, detail.str()};
}

Outcome criterion_determinism() {
  ExperimentConfig base;
  base.instance = staircase8();
  base.horizon = 300;
  base.reps = 60;
  base.base_seed = 777;
  base.lambda = 0.5;
  base.want_regret = true;

  std::vector<PolicySpec> policies;
  PolicySpec uniform;
  policies.push_back(uniform);
  policies.push_back(adaptive_policy(PolicyKind::NARP));

  auto render = [&](int threads) {
    std::ostringstream csv;
    csv << "policy,sum_rmse,avg_regret,joint_loss\n";
    for (const auto& spec : policies) {
      ExperimentConfig run = base;
      run.policy = spec;
      const MetricsReport m = banditlab::run_experiment(run, threads);
      csv << banditlab::policy_name(spec.kind) << ',' << fmt(m.sum_rmse)
          << ',' << fmt(m.avg_regret) << ',' << fmt(m.joint_loss) << '\n';
    }
    return csv.str();
  };

  const std::string a = render(1);
  const std::string b = render(1);
  const std::string c = render(3);
  const std::string d = render(4);
  const bool pass = (a == b) && (a == c) && (a == d);
  std::ostringstream detail;
  if (pass) {
    detail << "CSV bytes identical across a rerun and thread counts "
              "{1,3,4} at a fixed seed";
  } else {
    detail << " [outputs diverged across reruns or thread counts]";
  }
  return {pass, detail.str()};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {"pilot-size thresholds and oracle gains", criterion_thresholds},
      {"penalty-factor analytics", criterion_penalty_factor},
      {"two-stage MSE across pilot sizes", criterion_pilot_mse_table},
      {"gain crossover on the ten-arm staircase", criterion_crossover},
      {"joint-loss comparison across policies", criterion_joint_table},
      {"joint-loss decay slopes", criterion_rate_slopes},
      {"oracle solver certification", criterion_oracle_solver},
      {"estimator unbiasedness and decomposition", criterion_estimators},
      {"narp forced-exploration floor", criterion_narp_floor},
      {"byte-identical output across reruns and threads",
       criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Outcome out;
    try {
      out = entries[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string(" [exception: ") + e.what() + "]";
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion-%zu: %s -- %s\n", out.pass ? "PASS" : "FAIL",
                i + 1, entries[i].name, out.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, entries.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", entries.size());
  return 0;
}
