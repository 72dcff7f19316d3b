#pragma once

// Mean estimators over run histories, and the Monte-Carlo error
// decomposition for the two-stage adaptive design.
//
// Three estimators:
//  * sample_mean: per-arm average of observed rewards; biased under adaptive
//    stopping/allocation but always defined when every arm has data.
//  * ht_estimate: Horvitz-Thompson, mu_i = (1/N) sum_t 1{I_t=i} X_t / p_t.
//    Unbiased whenever recorded assign_probs are the true conditional pull
//    probabilities and are measurable w.r.t. the past.
//  * pcipw_estimate: pilot-centered IPW for the two-stage design. Centering
//    each tail term at the pilot mean makes the pilot rounds cancel exactly,
//    so the implementation sums tail rounds only:
//      mu_i = pilot_mean_i
//           + (1/N) sum_{t > N1} 1{I_t=i} (X_t - pilot_mean_i) / p_t.
//
// The decomposition: conditionally on the pilot, the squared error of either
// IPW estimator splits into a pilot term, a sampling-variance term and (for
// PCIPW) a centering-shift term. mse_decomposition() estimates each term and
// the identity gap (squared error minus the sum of terms, zero in
// expectation) by simulating the design.

#include <cstdint>
#include <vector>

#include "banditlab/instance.hpp"

namespace banditlab {

enum class EstimatorKind { SampleMean, HT, PCIPW };

const char* estimator_name(EstimatorKind k);

struct EstimateVector {
  std::vector<double> estimates;
  EstimatorKind kind = EstimatorKind::SampleMean;
};

struct PilotSummary {
  std::vector<double> pilot_means;
  std::vector<double> pilot_sds;  // divisor n1 - 1
  std::int64_t n1 = 0;            // pulls per arm in the pilot
};

// Per-arm averages over the whole history. Throws std::runtime_error
// ("no samples for arm ...") if some arm was never pulled.
EstimateVector sample_mean(const RunHistory& history);
double sample_mean(const RunHistory& history, int arm);

// Summary of the first `pilot_rounds` records, which must form a balanced
// pilot (each arm exactly pilot_rounds / K times, pilot_rounds / K >= 2).
PilotSummary pilot_summary(const RunHistory& history,
                           std::int64_t pilot_rounds);

// Horvitz-Thompson over the full history. Throws if any assign_prob
// is outside (0,1] (histories built with RunHistory::add never are).
EstimateVector ht_estimate(const RunHistory& history);

// Pilot-centered IPW; `pilot` must summarize this history's first
// pilot.n1 * K rounds.
EstimateVector pcipw_estimate(const RunHistory& history,
                              const PilotSummary& pilot);

// Estimated-sigma floor: sds are clamped below at kSigmaFloorScale times the
// largest estimated sd before forming allocation weights, so a pilot that
// happens to measure zero spread on some arm cannot zero out its sampling
// probability. All-zero sds degrade to equal weights.
inline constexpr double kSigmaFloorScale = 1e-8;

std::vector<double> floored_sds(const std::vector<double>& sds);

// w_i proportional to floored sd_i (the variance-minimizing allocation).
std::vector<double> neyman_weights(const std::vector<double>& sds);

// w_i proportional to floored sd_i^(2/3) (the regret-tempered allocation
// used by the adaptive mixture policies).
std::vector<double> rooted_neyman_weights(const std::vector<double>& sds);

struct TwoStageDesign {
  std::int64_t horizon = 0;       // N
  std::int64_t pilot_rounds = 0;  // N1, divisible by K, N1/K >= 2, N1 <= N

  void validate(int num_arms) const;
};

struct DecompositionTerm {
  double value = 0.0;
  double se = 0.0;
};

struct ArmDecomposition {
  DecompositionTerm mse;            // mean squared error
  DecompositionTerm pilot_term;     // (N1/N)^2 (pilot_mean - mu)^2
  DecompositionTerm sampling_term;  // tail sampling variance given the pilot
  DecompositionTerm shift_term;     // PCIPW centering shift (zero for HT)
  DecompositionTerm identity_gap;   // mse - sum of terms; 0 in expectation
};

struct MseDecomposition {
  EstimatorKind kind = EstimatorKind::PCIPW;
  std::int64_t reps = 0;
  std::vector<ArmDecomposition> arms;
};

// Simulates the two-stage design mc_reps times (streams derive_stream(seed,
// rep); pilot rewards first, then per tail round one arm draw and one reward
// draw) and accumulates the decomposition for `kind` (HT or PCIPW only).
// Requires mc_reps >= 1000 so the term SEs are meaningful.
MseDecomposition mse_decomposition(const BanditInstance& instance,
                                   const TwoStageDesign& design,
                                   EstimatorKind kind, std::int64_t mc_reps,
                                   std::uint64_t base_seed);

}  // namespace banditlab
