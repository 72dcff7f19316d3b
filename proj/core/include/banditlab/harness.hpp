#pragma once

// Monte-Carlo harness: replications, metric aggregation, sweeps.
//
// Determinism contract: replication r always uses derive_stream(base_seed,
// r) and is simulated by the same single-threaded code path no matter how
// many workers run. Workers claim replication indices from an atomic
// counter and write into a per-replication slot; aggregation then reduces
// the slots in index order. Results are therefore bit-identical for any
// thread count, and CSVs printed from them are byte-identical.
//
// Metrics over R replications, per-arm squared errors sq_{r,i} and
// per-round regret regret_r = sum_i Delta_i T_{r,i} / N:
//   mse_i      = mean_r sq_{r,i}
//   total_mse  = sum_i mse_i
//   sum_rmse   = sum_i sqrt(mse_i)
//   avg_regret = mean_r regret_r
//   joint_loss = lambda * sum_rmse + (1-lambda) * avg_regret
// SEs are replication SEs; sum_rmse and joint_loss use the delta method
// (per-rep influence sum_i sq_{r,i} / (2 sqrt(mse_i))).

#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/estimators.hpp"
#include "banditlab/instance.hpp"
#include "banditlab/policies.hpp"

namespace banditlab {

struct ExperimentConfig {
  BanditInstance instance;
  PolicySpec policy;
  std::int64_t horizon = 0;
  std::int64_t reps = 0;
  std::uint64_t base_seed = 0;
  double lambda = 0.5;  // metric weight; endpoints allowed for diagnostics
  EstimatorKind estimator = EstimatorKind::SampleMean;
  bool want_regret = true;  // requires a unique optimal arm

  // Eagerly checks everything a replication would hit, including
  // estimator/policy compatibility:
  //   pcipw  -> two_stage_an only (it is defined by the pilot);
  //   ht     -> uniform / two_stage_an / oracle only (mixture policies
  //             record a bookkeeping value, not a marginal probability).
  void validate() const;
};

struct RepSummary {
  std::vector<double> sq_err;         // per-arm squared estimation error
  std::vector<std::int64_t> counts;   // pulls per arm
  double regret = 0.0;                // per-round regret; 0 if !want_regret
};

struct ReplicationResult {
  RunHistory history;
  EstimateVector estimates;
};

// Simulates replication `rep` (policy decision draws, then reward draw,
// every round) and evaluates the configured estimator. Reruns of the same
// (config, rep) reproduce the history record for record.
ReplicationResult run_replication(const ExperimentConfig& config,
                                  std::uint64_t rep);

RepSummary summarize_replication(const ExperimentConfig& config,
                                 const ReplicationResult& result);

// All replications, `threads` workers (values < 1 mean default_thread_count).
std::vector<RepSummary> run_replications(const ExperimentConfig& config,
                                         int threads = 1);

// BANDIT_LAB_THREADS if set and parseable, else hardware concurrency, else 1.
int default_thread_count();

struct MetricsReport {
  std::int64_t reps = 0;
  std::vector<double> mse;
  std::vector<double> mse_se;
  std::vector<double> mean_counts;  // E[T_i]
  double total_mse = 0.0, total_mse_se = 0.0;
  double sum_rmse = 0.0, sum_rmse_se = 0.0;
  bool has_regret = false;
  double avg_regret = 0.0, avg_regret_se = 0.0;
  double joint_loss = 0.0, joint_loss_se = 0.0;  // only if has_regret
};

MetricsReport aggregate(const ExperimentConfig& config,
                        const std::vector<RepSummary>& reps);

MetricsReport run_experiment(const ExperimentConfig& config, int threads = 1);

// Pilot-size sweep for the two-stage design against the uniform baseline.
// `base` must configure a two_stage_an policy (its pilot_rounds is replaced
// row by row, and each must be < horizon) and the estimator the adaptive
// rows should use; the baseline always uses the uniform policy with the
// sample mean. Rows are paired: replication r of every run uses
// derive_stream(base_seed, r). Delta_U SEs are reported both ways (paired
// per-rep differences, and the unpaired combination) since the pairing is
// a variance-reduction choice, not part of the estimand.
struct PilotSweepRow {
  std::int64_t pilot_rounds = 0;
  double adaptive_mse = 0.0, adaptive_mse_se = 0.0;
  double delta_u = 0.0;            // adaptive - uniform
  double delta_u_se_paired = 0.0;  // SE of the per-rep paired difference
  double delta_u_se_unpaired = 0.0;  // sqrt(se_A^2 + se_U^2)
  double gain_pct = 0.0;             // 100 (U - A) / U
};

struct PilotSweepResult {
  std::vector<PilotSweepRow> rows;
  double uniform_mse = 0.0, uniform_mse_se = 0.0;  // Monte-Carlo baseline
  double uniform_closed = 0.0;  // K V / N
  double neyman_closed = 0.0;   // S^2 / N
};

PilotSweepResult pilot_sweep(const ExperimentConfig& base,
                             const std::vector<std::int64_t>& pilot_list,
                             int threads = 1);

// Horizon sweep across policies, with log-log slopes per policy (OLS of
// ln metric on ln N; NaN if any point is nonpositive).
struct HorizonSweepRow {
  PolicyKind policy = PolicyKind::Uniform;
  std::int64_t horizon = 0;
  MetricsReport metrics;
};

struct HorizonSlope {
  PolicyKind policy = PolicyKind::Uniform;
  double joint = 0.0;
  double sum_rmse = 0.0;
  double avg_regret = 0.0;
};

struct HorizonSweepResult {
  std::vector<HorizonSweepRow> rows;
  std::vector<HorizonSlope> slopes;
};

HorizonSweepResult horizon_sweep(const ExperimentConfig& base,
                                 const std::vector<PolicySpec>& policies,
                                 const std::vector<std::int64_t>& grid,
                                 int threads = 1);

}  // namespace banditlab
