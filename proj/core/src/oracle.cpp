#include "banditlab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace banditlab {

void JointProblem::validate() const {
  if (sigmas.empty()) {
    throw std::invalid_argument("joint problem: needs at least one arm");
  }
  if (deltas.size() != sigmas.size()) {
    throw std::invalid_argument(
        "joint problem: sigmas and deltas must have equal length");
  }
  for (double s : sigmas) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("joint problem: sigmas must be > 0");
    }
  }
  int zeros = 0;
  for (double d : deltas) {
    if (!(d >= 0.0)) {
      throw std::invalid_argument("joint problem: deltas must be >= 0");
    }
    if (d == 0.0) ++zeros;
  }
  if (zeros != 1) {
    throw std::invalid_argument(
        "joint problem: deltas need exactly one zero entry");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument(
        "joint problem: lambda must lie strictly inside (0,1)");
  }
  if (horizon < 1) {
    throw std::invalid_argument("joint problem: horizon must be >= 1");
  }
}

double joint_objective(const JointProblem& problem,
                       const std::vector<double>& p) {
  problem.validate();
  if (p.size() != problem.sigmas.size()) {
    throw std::invalid_argument("joint_objective: wrong allocation length");
  }
  const double sqrt_n = std::sqrt(static_cast<double>(problem.horizon));
  double inference = 0.0;
  double regret = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) {
      throw std::domain_error("joint_objective: allocation must be > 0");
    }
    inference += problem.sigmas[i] / (sqrt_n * std::sqrt(p[i]));
    regret += problem.deltas[i] * p[i];
  }
  return problem.lambda * inference + (1.0 - problem.lambda) * regret;
}

namespace {

// p_i(alpha) for alpha < 0; denominators (1-lambda) Delta_i - alpha stay
// positive there.
void allocation_at(const JointProblem& pr, double alpha,
                   std::vector<double>& p) {
  const double sqrt_n = std::sqrt(static_cast<double>(pr.horizon));
  for (std::size_t i = 0; i < pr.sigmas.size(); ++i) {
    const double denom = (1.0 - pr.lambda) * pr.deltas[i] - alpha;
    const double c = pr.lambda * pr.sigmas[i] / (2.0 * sqrt_n * denom);
    p[i] = std::cbrt(c * c);
  }
}

double allocation_sum(const JointProblem& pr, double alpha,
                      std::vector<double>& scratch) {
  allocation_at(pr, alpha, scratch);
  double s = 0.0;
  for (double x : scratch) s += x;
  return s;
}

}  // namespace

OracleSolution solve_oracle(const JointProblem& problem, double tol,
                            int max_iter) {
  problem.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_oracle: tol must be > 0");
  if (max_iter < 1) {
    throw std::invalid_argument("solve_oracle: max_iter must be >= 1");
  }

  const int k = problem.num_arms();
  const double sqrt_n = std::sqrt(static_cast<double>(problem.horizon));
  OracleSolution sol;
  sol.p_star.assign(static_cast<std::size_t>(k), 0.0);

  if (k == 1) {
    // Single arm: the allocation is forced and alpha comes from stationarity.
    sol.p_star[0] = 1.0;
    sol.alpha_star = -problem.lambda * problem.sigmas[0] / (2.0 * sqrt_n);
    sol.objective_value = joint_objective(problem, sol.p_star);
    sol.kkt_residual = 0.0;
    return sol;
  }

  double delta_max = 0.0;
  for (double d : problem.deltas) delta_max = std::max(delta_max, d);

  std::vector<double> scratch(static_cast<std::size_t>(k), 0.0);
  double alpha_lo = -((1.0 - problem.lambda) * delta_max * 1e3 + 1.0);
  int expansions = 0;
  while (allocation_sum(problem, alpha_lo, scratch) >= 1.0) {
    alpha_lo *= 2.0;
    if (++expansions > 2000) {
      throw SolverError("solve_oracle: could not bracket the multiplier");
    }
  }
  double alpha_hi = -1e-30 * std::max(1.0, (1.0 - problem.lambda) * delta_max);

  double alpha = 0.5 * (alpha_lo + alpha_hi);
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    alpha = 0.5 * (alpha_lo + alpha_hi);
    const double s = allocation_sum(problem, alpha, scratch);
    if (std::fabs(s - 1.0) <= tol) {
      converged = true;
      break;
    }
    if (s > 1.0) {
      alpha_hi = alpha;
    } else {
      alpha_lo = alpha;
    }
  }
  if (!converged) {
    throw SolverError(
        "solve_oracle: bisection did not reach tolerance within max_iter");
  }

  allocation_at(problem, alpha, sol.p_star);
  sol.alpha_star = alpha;
  sol.objective_value = joint_objective(problem, sol.p_star);
  double resid = 0.0;
  for (int i = 0; i < k; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double lhs = problem.lambda * problem.sigmas[ii] /
                       (2.0 * sqrt_n * std::pow(sol.p_star[ii], 1.5));
    const double rhs = (1.0 - problem.lambda) * problem.deltas[ii] - alpha;
    resid = std::max(resid, std::fabs(lhs - rhs));
  }
  sol.kkt_residual = resid;
  return sol;
}

JointProblem joint_problem_from_instance(const BanditInstance& instance,
                                         double lambda, std::int64_t horizon) {
  instance.validate();
  JointProblem pr;
  pr.sigmas = instance.std_devs;
  pr.deltas = gaps(instance);
  pr.lambda = lambda;
  pr.horizon = horizon;
  pr.validate();
  return pr;
}

std::vector<RatePoint> oracle_rate_curve(const JointProblem& base,
                                         const std::vector<std::int64_t>& grid,
                                         double tol, int max_iter) {
  if (grid.empty()) {
    throw std::invalid_argument("oracle_rate_curve: empty horizon grid");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw std::invalid_argument(
          "oracle_rate_curve: horizon grid must be strictly ascending");
    }
  }
  std::vector<RatePoint> out;
  out.reserve(grid.size());
  for (std::int64_t n : grid) {
    JointProblem pr = base;
    pr.horizon = n;
    RatePoint pt;
    pt.horizon = n;
    pt.solution = solve_oracle(pr, tol, max_iter);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace banditlab
