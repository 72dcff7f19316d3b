#pragma once

// Sampling policies.
//
//  * uniform: every round i.i.d. uniform over arms.
//  * two_stage_an: balanced blocked pilot of N1 rounds (arm 0 first), then
//    i.i.d. draws from the estimated-sd allocation w_i = sd_i / sum sd_j
//    (floored, see estimators.hpp). The design the threshold calculator
//    analyzes.
//  * oracle: solves the joint inference/regret problem once (true sds and
//    gaps, fixed lambda and horizon) and samples i.i.d. from p_star.
//  * sarp: simple adaptive rate policy. K warmup pulls, then at round t
//    explore with probability x_t = min(1, c_x t^(-1/3)) from a fixed
//    full-support distribution p0 (default uniform), otherwise delegate to
//    a regret-minimizing algorithm.
//  * narp: plug-in adaptive rate policy. m0 pulls per arm of warmup, a
//    forced floor that keeps every arm's count at least m0 + ceil(alpha
//    sqrt(t)), and otherwise an explore/exploit mixture whose exploration
//    rate and distribution are plug-in estimates of the oracle's: explore
//    from w_i proportional to sd_i^(2/3) with probability x_t = min(1,
//    (lambda M / ((1-lambda) L))^(2/3) t^(-1/3)), estimated from all data
//    so far.
//
// Delegate algorithms (ALG) keep their own statistics and, by default, see
// only the rounds they played plus warmup (intermittent execution:
// alg_sees_all_data=false). Gaussian Thompson draws exactly K normals per
// choose; UCB1 is deterministic given its state, so mixture rounds can
// record the exact pull probability. assign_prob bookkeeping per round:
//
//   warmup/forced: 1.   pilot: 1/K.   i.i.d. policies: the sampled weight.
//   mixture + UCB1: x_t p0[a] + (1-x_t) 1{a == ucb choice} on both branches.
//   mixture + Thompson: x_t p0[a] on explore rounds, x_t p0[a] + (1-x_t) on
//     the realized exploit arm. The Thompson exploit value is a bookkeeping
//     convention (the realized indicator, not a marginal probability);
//     inverse-propensity estimators are rejected for mixture policies at
//     config validation, so nothing downstream ever divides by it.
//
// RNG discipline per round, frozen: the policy's decision draws come first
// (uniform policy: 1 uniform; two-stage pilot: none; two-stage tail: 1;
// oracle: 1; mixture rounds: 1 coin + either 1 explore uniform or the ALG's
// draws -- K for Thompson, none for UCB1; warmup/forced: none), then the
// harness draws the reward (1 uniform).

#include <cstdint>
#include <memory>
#include <vector>

#include "banditlab/estimators.hpp"
#include "banditlab/instance.hpp"

namespace banditlab {

enum class PolicyKind { Uniform, TwoStageAN, OracleStatic, SARP, NARP };
enum class AlgKind { ThompsonGaussian, UCB1 };

const char* policy_name(PolicyKind k);
const char* alg_name(AlgKind k);

struct AlgSpec {
  AlgKind kind = AlgKind::ThompsonGaussian;
  double thompson_scale = 1.0;  // posterior scale s: theta_i ~ N(mean_i, s^2/n_i)
  double ucb_c = 1.0;           // bonus c * sqrt(2 ln n / n_i)
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::Uniform;
  std::int64_t pilot_rounds = 0;   // two_stage_an: N1
  double c_x = 1.0;                // sarp exploration scale
  std::vector<double> p0;          // sarp explore distribution; empty = uniform
  std::int64_t m0 = 2;             // narp warmup pulls per arm (>= 2)
  double alpha = 1.0;              // narp forced-floor rate (> 0)
  double lambda = 0.5;             // narp plug-in + oracle objective weight
  AlgSpec alg;                     // sarp/narp delegate
  bool alg_sees_all_data = false;  // feed ALG explore/forced rounds too
};

struct ActionDecision {
  int arm = 0;
  double assign_prob = 1.0;
  Branch branch = Branch::Exploit;
};

// Delegate regret-minimizing algorithm with its own view of the data.
class Alg {
 public:
  virtual ~Alg() = default;
  virtual int choose(std::int64_t t, RngStream& rng) = 0;
  // True when choose() is a deterministic function of state; then
  // peek(t) returns that choice without consuming randomness.
  virtual bool deterministic() const = 0;
  virtual int peek(std::int64_t t) const = 0;
  virtual void update(int arm, double reward) = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  // t is 1-based and must be called in order; consumes only the decision
  // draws documented above.
  virtual ActionDecision decide(std::int64_t t, RngStream& rng) = 0;
  // Feed back the realized reward for the decision just taken.
  virtual void observe(const ActionDecision& decision, double reward) = 0;
  virtual PolicyKind kind() const = 0;
};

std::unique_ptr<Alg> make_alg(const AlgSpec& spec, int num_arms);

// Validates the policy spec against the instance/horizon (throws
// std::invalid_argument; the oracle policy can also throw SolverError).
std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const BanditInstance& instance,
                                    std::int64_t horizon);

}  // namespace banditlab
