#pragma once

// Design calculator: closed-form MSEs, the moment constant beta_nu, and the
// exact finite-sample condition for the two-stage adaptive design to beat
// the uniform design on total MSE.
//
// Notation, for arm sds sigma_1..sigma_K:
//   S = sum_i sigma_i,  V = sum_i sigma_i^2.
// Closed forms at horizon N:
//   uniform total MSE            = K * V / N
//   oracle-Neyman total MSE      = S^2 / N
//   oracle gain (percent)        = 100 * (1 - S^2 / (K V))
// With a balanced Gaussian pilot of n1 = N1/K per arm, each estimated sd is
// sigma_i * sqrt(chi^2_nu / nu) with nu = n1 - 1, and the tail allocation's
// expected inverse weights involve
//   beta_nu = E sqrt(F_{nu,nu})
//           = Gamma((nu+1)/2) * Gamma((nu-1)/2) / Gamma(nu/2)^2,
// finite only for nu >= 2, strictly decreasing in nu, limit 1.
//
// The adaptive design (with the pilot-centered IPW estimator) has total MSE
// no larger than the uniform design's exactly when
//   beta_nu <= (K-1) V / (S^2 - V) * 1 / (1 + K/N1),   nu = N1/K - 1,
// and a gamma-free sufficient check (valid for N1 > 3K) replaces beta_nu by
// its Cauchy-Schwarz bound sqrt((N1-K)/(N1-3K)).

#include <cstdint>
#include <optional>
#include <vector>

namespace banditlab {

struct VarianceProfile {
  std::vector<double> sigmas;

  int num_arms() const { return static_cast<int>(sigmas.size()); }
  // Recomputed on demand so they can never go stale.
  double sum_sigma() const;         // S
  double sum_variance() const;      // V
  void validate() const;            // K >= 1, all sigmas > 0
};

// ln Gamma(x) for x >= 0.5 (all uses here have x >= 0.5), Lanczos g=7.
double log_gamma(double x);

// beta_nu above; accepts real nu. Throws std::domain_error for nu <= 1
// ("divergent moment"). beta_2 = pi/2, beta_3 = 4/pi, beta_nu -> 1.
double beta_nu(double nu);

double uniform_total_mse(const VarianceProfile& profile, std::int64_t horizon);
double neyman_total_mse(const VarianceProfile& profile, std::int64_t horizon);
// 100 * (1 - S^2/(K V)); zero when all sigmas are equal.
double oracle_gain_pct(const VarianceProfile& profile);

struct ExactCondition {
  bool holds = false;
  double beta = 0.0;  // beta_nu at nu = N1/K - 1 (+inf when nu == 1)
  double rhs = 0.0;   // (K-1) V / (S^2 - V) / (1 + K/N1)
};

// Exact condition at pilot size N1 (multiple of K, N1/K >= 2). nu == 1 is a
// legal query: beta is infinite, so the condition fails rather than throws.
// Equal sigmas give (K-1)V/(S^2-V) == 1 exactly, and since beta_nu > 1 the
// condition then fails at every N1: no pilot size beats uniform when there
// is nothing to learn.
ExactCondition exact_condition_holds(const VarianceProfile& profile,
                                     std::int64_t pilot_rounds);

// Gamma-free sufficient check: (1 + K/N1) sqrt((N1-K)/(N1-3K)) <= (K-1) V /
// (S^2 - V). Throws std::domain_error unless N1 > 3K (outside the bound's
// domain).
bool sufficient_condition_holds(const VarianceProfile& profile,
                                std::int64_t pilot_rounds);

struct ThresholdCandidate {
  std::int64_t pilot_rounds = 0;
  double beta = 0.0;
  double rhs = 0.0;
  bool passes = false;
};

struct ThresholdReport {
  // Smallest N1 in {3K, 4K, ...} passing the exact condition; empty when no
  // candidate within the scan bound passes (e.g. equal-ish sigmas can still
  // pass; strongly homogeneous profiles never do... then "none").
  std::optional<std::int64_t> n1_min;
  double oracle_gain_pct = 0.0;
  double ratio_rhs = 0.0;  // (K-1) V / (S^2 - V), the N1-free part
  // Audit trail: every candidate evaluated, in scan order. The scan stops at
  // the first pass (monotonicity in N1 is not assumed).
  std::vector<ThresholdCandidate> per_candidate;
};

// Scans N1 = 3K, 4K, ..., max_multiple*K. K must be >= 2 (with one arm there
// is no allocation problem and S^2 == V).
ThresholdReport min_pilot_size(const VarianceProfile& profile,
                               std::int64_t max_multiple = 500);

}  // namespace banditlab
