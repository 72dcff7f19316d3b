#include "banditlab/harness.hpp"

#include "banditlab/design.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace banditlab {

void ExperimentConfig::validate() const {
  instance.validate();
  if (horizon < 1) {
    throw std::invalid_argument("experiment: horizon must be >= 1");
  }
  if (reps < 1) {
    throw std::invalid_argument("experiment: reps must be >= 1");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("experiment: lambda must lie in [0,1]");
  }
  if (estimator == EstimatorKind::PCIPW &&
      policy.kind != PolicyKind::TwoStageAN) {
    throw std::invalid_argument(
        "experiment: pcipw is defined by the two-stage pilot; use it only "
        "with the two_stage_an policy");
  }
  if (estimator == EstimatorKind::HT &&
      !(policy.kind == PolicyKind::Uniform ||
        policy.kind == PolicyKind::TwoStageAN ||
        policy.kind == PolicyKind::OracleStatic)) {
    throw std::invalid_argument(
        "experiment: ht needs exact sampling probabilities; mixture "
        "policies record a bookkeeping value instead");
  }
  if (want_regret) {
    gaps(instance);  // throws when the optimal arm is not unique
  }
  // Builds one throwaway policy so config errors surface before any
  // replication starts (may also throw SolverError for the oracle policy).
  make_policy(policy, instance, horizon);
}

ReplicationResult run_replication(const ExperimentConfig& config,
                                  std::uint64_t rep) {
  const int k = config.instance.num_arms();
  RngStream rng = derive_stream(config.base_seed, rep);
  auto policy = make_policy(config.policy, config.instance, config.horizon);

  ReplicationResult out;
  out.history = RunHistory(k);
  out.history.reserve(static_cast<std::size_t>(config.horizon));
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const ActionDecision d = policy->decide(t, rng);
    const double x = draw_reward(config.instance, d.arm, rng);
    policy->observe(d, x);
    out.history.add({t, d.arm, x, d.assign_prob, d.branch});
  }

  switch (config.estimator) {
    case EstimatorKind::SampleMean:
      out.estimates = sample_mean(out.history);
      break;
    case EstimatorKind::HT:
      out.estimates = ht_estimate(out.history);
      break;
    case EstimatorKind::PCIPW: {
      const PilotSummary pilot =
          pilot_summary(out.history, config.policy.pilot_rounds);
      out.estimates = pcipw_estimate(out.history, pilot);
      break;
    }
  }
  return out;
}

RepSummary summarize_replication(const ExperimentConfig& config,
                                 const ReplicationResult& result) {
  const int k = config.instance.num_arms();
  RepSummary out;
  out.sq_err.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double err =
        result.estimates.estimates[ii] - config.instance.means[ii];
    out.sq_err[ii] = err * err;
  }
  out.counts = result.history.counts;
  if (config.want_regret) {
    const std::vector<double> delta = gaps(config.instance);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      total += delta[ii] * static_cast<double>(out.counts[ii]);
    }
    out.regret = total / static_cast<double>(config.horizon);
  }
  return out;
}

int default_thread_count() {
  if (const char* env = std::getenv("BANDIT_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) {
      return static_cast<int>(v);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<RepSummary> run_replications(const ExperimentConfig& config,
                                         int threads) {
  config.validate();
  if (threads < 1) threads = default_thread_count();
  const std::int64_t reps = config.reps;
  std::vector<RepSummary> out(static_cast<std::size_t>(reps));

  const int workers =
      static_cast<int>(std::min<std::int64_t>(threads, reps));
  if (workers <= 1) {
    for (std::int64_t r = 0; r < reps; ++r) {
      out[static_cast<std::size_t>(r)] = summarize_replication(
          config, run_replication(config, static_cast<std::uint64_t>(r)));
    }
    return out;
  }

  // Workers claim indices; each index is computed identically regardless of
  // which worker gets it, so the filled buffer is thread-count-invariant.
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const std::int64_t r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        out[static_cast<std::size_t>(r)] = summarize_replication(
            config, run_replication(config, static_cast<std::uint64_t>(r)));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Plain mean and replication SE, accumulated in index order.
MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return out;
  double mean = 0.0, m2 = 0.0;
  std::int64_t count = 0;
  for (double x : xs) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  out.mean = mean;
  if (count > 1) out.se = std::sqrt(m2 / static_cast<double>(count - 1) / n);
  return out;
}

}  // namespace

MetricsReport aggregate(const ExperimentConfig& config,
                        const std::vector<RepSummary>& reps) {
  if (reps.empty()) throw std::invalid_argument("aggregate: no replications");
  const int k = config.instance.num_arms();
  const auto r_count = static_cast<std::int64_t>(reps.size());

  MetricsReport rep;
  rep.reps = r_count;
  rep.mse.resize(static_cast<std::size_t>(k));
  rep.mse_se.resize(static_cast<std::size_t>(k));
  rep.mean_counts.resize(static_cast<std::size_t>(k));

  std::vector<double> scratch(reps.size());
  for (int i = 0; i < k; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      scratch[r] = reps[r].sq_err[ii];
    }
    const MeanSe ms = mean_se(scratch);
    rep.mse[ii] = ms.mean;
    rep.mse_se[ii] = ms.se;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      scratch[r] = static_cast<double>(reps[r].counts[ii]);
    }
    rep.mean_counts[ii] = mean_se(scratch).mean;
  }

  for (std::size_t r = 0; r < reps.size(); ++r) {
    double tot = 0.0;
    for (int i = 0; i < k; ++i) {
      tot += reps[r].sq_err[static_cast<std::size_t>(i)];
    }
    scratch[r] = tot;
  }
  {
    const MeanSe ms = mean_se(scratch);
    rep.total_mse = ms.mean;
    rep.total_mse_se = ms.se;
  }

  double sum_rmse = 0.0;
  for (int i = 0; i < k; ++i) {
    sum_rmse += std::sqrt(rep.mse[static_cast<std::size_t>(i)]);
  }
  rep.sum_rmse = sum_rmse;
  // Delta method: d sum_rmse / d sq_{r,i} contributes sq_{r,i}/(2 rmse_i).
  std::vector<double> influence(reps.size());
  for (std::size_t r = 0; r < reps.size(); ++r) {
    double h = 0.0;
    for (int i = 0; i < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      if (rep.mse[ii] > 0.0) {
        h += reps[r].sq_err[ii] / (2.0 * std::sqrt(rep.mse[ii]));
      }
    }
    influence[r] = h;
  }
  rep.sum_rmse_se = mean_se(influence).se;

  rep.has_regret = config.want_regret;
  if (config.want_regret) {
    for (std::size_t r = 0; r < reps.size(); ++r) scratch[r] = reps[r].regret;
    const MeanSe ms = mean_se(scratch);
    rep.avg_regret = ms.mean;
    rep.avg_regret_se = ms.se;
    rep.joint_loss =
        config.lambda * rep.sum_rmse + (1.0 - config.lambda) * rep.avg_regret;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      scratch[r] =
          config.lambda * influence[r] + (1.0 - config.lambda) * reps[r].regret;
    }
    rep.joint_loss_se = mean_se(scratch).se;
  }
  return rep;
}

MetricsReport run_experiment(const ExperimentConfig& config, int threads) {
  return aggregate(config, run_replications(config, threads));
}

PilotSweepResult pilot_sweep(const ExperimentConfig& base,
                             const std::vector<std::int64_t>& pilot_list,
                             int threads) {
  if (base.policy.kind != PolicyKind::TwoStageAN) {
    throw std::invalid_argument(
        "pilot_sweep: base config must use the two_stage_an policy");
  }
  if (pilot_list.empty()) {
    throw std::invalid_argument("pilot_sweep: empty pilot list");
  }
  for (std::int64_t n1 : pilot_list) {
    if (n1 >= base.horizon) {
      throw std::invalid_argument(
          "pilot_sweep: pilot sizes must be smaller than the horizon");
    }
  }

  ExperimentConfig uni = base;
  uni.policy = PolicySpec{};
  uni.policy.kind = PolicyKind::Uniform;
  uni.estimator = EstimatorKind::SampleMean;
  uni.want_regret = false;
  const std::vector<RepSummary> u_reps = run_replications(uni, threads);

  std::vector<double> u_tot(u_reps.size());
  for (std::size_t r = 0; r < u_reps.size(); ++r) {
    double tot = 0.0;
    for (double s : u_reps[r].sq_err) tot += s;
    u_tot[r] = tot;
  }
  const MeanSe u_ms = mean_se(u_tot);

  PilotSweepResult out;
  out.uniform_mse = u_ms.mean;
  out.uniform_mse_se = u_ms.se;
  VarianceProfile profile{base.instance.std_devs};
  out.uniform_closed = uniform_total_mse(profile, base.horizon);
  out.neyman_closed = neyman_total_mse(profile, base.horizon);

  std::vector<double> a_tot(u_reps.size());
  std::vector<double> diff(u_reps.size());
  for (std::int64_t n1 : pilot_list) {
    ExperimentConfig cfg = base;
    cfg.policy.pilot_rounds = n1;
    cfg.want_regret = false;
    const std::vector<RepSummary> a_reps = run_replications(cfg, threads);
    for (std::size_t r = 0; r < a_reps.size(); ++r) {
      double tot = 0.0;
      for (double s : a_reps[r].sq_err) tot += s;
      a_tot[r] = tot;
      diff[r] = tot - u_tot[r];  // paired on derive_stream(base_seed, r)
    }
    const MeanSe a_ms = mean_se(a_tot);
    const MeanSe d_ms = mean_se(diff);
    PilotSweepRow row;
    row.pilot_rounds = n1;
    row.adaptive_mse = a_ms.mean;
    row.adaptive_mse_se = a_ms.se;
    row.delta_u = d_ms.mean;
    row.delta_u_se_paired = d_ms.se;
    row.delta_u_se_unpaired =
        std::sqrt(a_ms.se * a_ms.se + u_ms.se * u_ms.se);
    row.gain_pct = 100.0 * (u_ms.mean - a_ms.mean) / u_ms.mean;
    out.rows.push_back(row);
  }
  return out;
}

namespace {

double loglog_slope(const std::vector<std::int64_t>& n,
                    const std::vector<double>& y) {
  const std::size_t m = n.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(static_cast<double>(n[i]));
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double md = static_cast<double>(m);
  const double denom = md * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (md * sxy - sx * sy) / denom;
}

}  // namespace

HorizonSweepResult horizon_sweep(const ExperimentConfig& base,
                                 const std::vector<PolicySpec>& policies,
                                 const std::vector<std::int64_t>& grid,
                                 int threads) {
  if (policies.empty() || grid.size() < 2) {
    throw std::invalid_argument(
        "horizon_sweep: needs at least one policy and two horizons");
  }
  HorizonSweepResult out;
  for (const PolicySpec& spec : policies) {
    std::vector<double> joint(grid.size());
    std::vector<double> rmse(grid.size());
    std::vector<double> regret(grid.size());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      ExperimentConfig cfg = base;
      cfg.policy = spec;
      cfg.horizon = grid[gi];
      cfg.want_regret = true;
      HorizonSweepRow row;
      row.policy = spec.kind;
      row.horizon = grid[gi];
      row.metrics = run_experiment(cfg, threads);
      joint[gi] = row.metrics.joint_loss;
      rmse[gi] = row.metrics.sum_rmse;
      regret[gi] = row.metrics.avg_regret;
      out.rows.push_back(std::move(row));
    }
    HorizonSlope slope;
    slope.policy = spec.kind;
    slope.joint = loglog_slope(grid, joint);
    slope.sum_rmse = loglog_slope(grid, rmse);
    slope.avg_regret = loglog_slope(grid, regret);
    out.slopes.push_back(slope);
  }
  return out;
}

}  // namespace banditlab
