#pragma once

// Problem instances and run histories.
//
// A BanditInstance is a fixed K-armed environment with per-arm reward
// distributions (currently Gaussian). A RunHistory is the complete record of
// one replication: one RoundRecord per round, including the probability the
// policy assigned to the pulled arm at decision time. That probability is
// what the inverse-propensity estimators divide by, so it must always be in
// (0, 1] -- deterministic pulls record exactly 1.

#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

enum class RewardFamily { Gaussian };

struct BanditInstance {
  std::vector<double> means;
  std::vector<double> std_devs;  // sigma_i > 0
  RewardFamily family = RewardFamily::Gaussian;

  int num_arms() const { return static_cast<int>(means.size()); }

  // Throws std::invalid_argument if sizes mismatch, K == 0, or any sd <= 0.
  void validate() const;
};

// Which rule produced a pull. Warmup/Forced pulls are deterministic
// (assign_prob 1); Pilot pulls are the blocked first stage (assign_prob 1/K);
// Explore/Exploit are the two branches of the mixture policies.
enum class Branch { Warmup, Pilot, Forced, Explore, Exploit };

const char* branch_name(Branch b);

struct RoundRecord {
  std::int64_t t = 0;       // 1-based round index
  int arm = 0;              // pulled arm, 0-based
  double reward = 0.0;
  double assign_prob = 1.0; // P(pull this arm | past), in (0,1]
  Branch branch = Branch::Exploit;
};

struct RunHistory {
  int num_arms = 0;
  std::vector<RoundRecord> records;
  std::vector<std::int64_t> counts;  // pulls per arm, kept in sync by add()

  explicit RunHistory(int k = 0)
      : num_arms(k), counts(static_cast<std::size_t>(k), 0) {}

  void reserve(std::size_t n) { records.reserve(n); }

  // Appends a record; validates arm range, assign_prob in (0,1], and that t
  // equals the number of records so far plus one.
  void add(const RoundRecord& rec);

  std::int64_t horizon() const {
    return static_cast<std::int64_t>(records.size());
  }
};

// One Gaussian reward draw for `arm`; consumes exactly one uniform.
double draw_reward(const BanditInstance& instance, int arm, RngStream& rng);

// Index of the arm with the strictly largest mean. Throws
// std::invalid_argument if the best mean is tied ("optimal arm not unique").
int optimal_arm(const BanditInstance& instance);

// Suboptimality gaps Delta_i = max_j mu_j - mu_i (exactly one zero entry).
// Same uniqueness requirement as optimal_arm.
std::vector<double> gaps(const BanditInstance& instance);

}  // namespace banditlab
