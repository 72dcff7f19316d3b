#pragma once

// Oracle static allocation trading off inference and regret.
//
// For a K-armed instance with sds sigma_i, gaps Delta_i (exactly one zero),
// weight lambda in (0,1) and horizon N, the oracle picks a fixed sampling
// distribution p minimizing
//
//   J(p) = lambda * sum_i sigma_i / sqrt(N p_i)
//        + (1-lambda) * sum_i Delta_i p_i.
//
// J is strictly convex on the simplex interior, so the first-order system
// characterizes the optimum: there is a multiplier alpha < 0 with
//
//   p_i(alpha) = [ lambda sigma_i / (2 sqrt(N) ((1-lambda) Delta_i - alpha)) ]^(2/3)
//
// and sum_i p_i(alpha) = 1. The sum is strictly increasing in alpha on
// (-inf, 0), from 0 to +inf, so the root is found by bisection. As N grows,
// p_i for suboptimal arms scales like N^(-1/3) and the optimal value like
// N^(-1/3): sublinear exploration is the price of joint optimality.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "banditlab/instance.hpp"

namespace banditlab {

// Numerical failure inside an iterative solver (bracketing or convergence).
// The CLI maps this to its own exit code, distinct from config errors.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct JointProblem {
  std::vector<double> sigmas;  // all > 0
  std::vector<double> deltas;  // all >= 0, exactly one zero
  double lambda = 0.5;         // strictly inside (0,1)
  std::int64_t horizon = 1;    // N >= 1

  int num_arms() const { return static_cast<int>(sigmas.size()); }
  void validate() const;
};

struct OracleSolution {
  std::vector<double> p_star;   // strictly positive, sums to 1 within 1e-12
  double alpha_star = 0.0;      // < 0
  double objective_value = 0.0; // J(p_star)
  double kkt_residual = 0.0;    // max_i |stationarity violation|
};

// J(p); throws std::domain_error if any p_i <= 0. p need not sum to 1 (the
// solver's own feasibility is reported separately).
double joint_objective(const JointProblem& problem,
                       const std::vector<double>& p);

// Bisection on alpha until |sum p(alpha) - 1| <= tol. Throws SolverError if
// the bracket cannot be established or max_iter bisection steps do not
// reach tol.
OracleSolution solve_oracle(const JointProblem& problem, double tol = 1e-12,
                            int max_iter = 200);

// Gaps + sds of an instance at the given lambda/horizon.
JointProblem joint_problem_from_instance(const BanditInstance& instance,
                                         double lambda, std::int64_t horizon);

struct RatePoint {
  std::int64_t horizon = 0;
  OracleSolution solution;
};

// Solves the same (sigmas, deltas, lambda) problem across a horizon grid;
// exposes how the optimal value and the best-arm share move with N.
std::vector<RatePoint> oracle_rate_curve(const JointProblem& base,
                                         const std::vector<std::int64_t>& grid,
                                         double tol = 1e-12,
                                         int max_iter = 200);

}  // namespace banditlab
