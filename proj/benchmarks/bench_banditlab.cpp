// Microbenchmarks for the hot paths: single-replication simulation for each
// policy family, the estimators on a fixed history, the KKT solver, and the
// pilot-size scan.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "banditlab/design.hpp"
#include "banditlab/estimators.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/instance.hpp"
#include "banditlab/oracle.hpp"
#include "banditlab/policies.hpp"

namespace {

using banditlab::BanditInstance;
using banditlab::EstimatorKind;
using banditlab::ExperimentConfig;
using banditlab::PolicyKind;
using banditlab::PolicySpec;

BanditInstance staircase8() {
  return BanditInstance{{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5},
                        {1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0}};
}

ExperimentConfig base_config(PolicyKind kind, std::int64_t horizon) {
  ExperimentConfig cfg;
  cfg.instance = staircase8();
  cfg.policy.kind = kind;
  cfg.policy.lambda = 0.5;
  cfg.policy.alg.thompson_scale = 2.5;
  if (kind == PolicyKind::TwoStageAN) cfg.policy.pilot_rounds = 80;
  cfg.horizon = horizon;
  cfg.reps = 1;
  cfg.base_seed = 99;
  cfg.want_regret = kind != PolicyKind::TwoStageAN;
  if (kind == PolicyKind::TwoStageAN) cfg.estimator = EstimatorKind::PCIPW;
  return cfg;
}

void BM_replication(benchmark::State& state, PolicyKind kind) {
  const ExperimentConfig cfg =
      base_config(kind, static_cast<std::int64_t>(state.range(0)));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(banditlab::run_replication(cfg, rep++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_uniform(benchmark::State& state) {
  BM_replication(state, PolicyKind::Uniform);
}
void BM_two_stage(benchmark::State& state) {
  BM_replication(state, PolicyKind::TwoStageAN);
}
void BM_sarp(benchmark::State& state) {
  BM_replication(state, PolicyKind::SARP);
}
void BM_narp(benchmark::State& state) {
  BM_replication(state, PolicyKind::NARP);
}

BENCHMARK(BM_uniform)->Arg(1000)->Arg(10000);
BENCHMARK(BM_two_stage)->Arg(1000)->Arg(10000);
BENCHMARK(BM_sarp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_narp)->Arg(1000)->Arg(10000);

void BM_estimators(benchmark::State& state, EstimatorKind kind) {
  ExperimentConfig cfg = base_config(PolicyKind::TwoStageAN, 2000);
  cfg.estimator = kind;
  const auto rep = banditlab::run_replication(cfg, 0);
  const auto pilot = banditlab::pilot_summary(rep.history, 80);
  for (auto _ : state) {
    switch (kind) {
      case EstimatorKind::SampleMean:
        benchmark::DoNotOptimize(banditlab::sample_mean(rep.history));
        break;
      case EstimatorKind::HT:
        benchmark::DoNotOptimize(banditlab::ht_estimate(rep.history));
        break;
      case EstimatorKind::PCIPW:
        benchmark::DoNotOptimize(
            banditlab::pcipw_estimate(rep.history, pilot));
        break;
    }
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_sample_mean(benchmark::State& state) {
  BM_estimators(state, EstimatorKind::SampleMean);
}
void BM_ht(benchmark::State& state) {
  BM_estimators(state, EstimatorKind::HT);
}
void BM_pcipw(benchmark::State& state) {
  BM_estimators(state, EstimatorKind::PCIPW);
}

BENCHMARK(BM_sample_mean);
BENCHMARK(BM_ht);
BENCHMARK(BM_pcipw);

void BM_solve_oracle(benchmark::State& state) {
  const banditlab::JointProblem problem =
      banditlab::joint_problem_from_instance(staircase8(), 0.5,
                                             state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(banditlab::solve_oracle(problem));
  }
}

BENCHMARK(BM_solve_oracle)->Arg(1000)->Arg(1000000);

void BM_min_pilot_size(benchmark::State& state) {
  const banditlab::VarianceProfile profile{{3, 3, 3, 4}};  // scans to 260
  for (auto _ : state) {
    benchmark::DoNotOptimize(banditlab::min_pilot_size(profile));
  }
}

BENCHMARK(BM_min_pilot_size);

}  // namespace

BENCHMARK_MAIN();
