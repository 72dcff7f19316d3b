#include "banditlab/instance.hpp"

#include <algorithm>
#include <stdexcept>

namespace banditlab {

void BanditInstance::validate() const {
  if (means.empty()) {
    throw std::invalid_argument("instance: needs at least one arm");
  }
  if (means.size() != std_devs.size()) {
    throw std::invalid_argument(
        "instance: means and std_devs must have equal length");
  }
  for (double s : std_devs) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("instance: std_devs must be > 0");
    }
  }
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Warmup:  return "warmup";
    case Branch::Pilot:   return "pilot";
    case Branch::Forced:  return "forced";
    case Branch::Explore: return "explore";
    case Branch::Exploit: return "exploit";
  }
  return "?";
}

void RunHistory::add(const RoundRecord& rec) {
  if (rec.arm < 0 || rec.arm >= num_arms) {
    throw std::invalid_argument("history: arm out of range");
  }
  if (!(rec.assign_prob > 0.0 && rec.assign_prob <= 1.0)) {
    throw std::invalid_argument("history: assign_prob must be in (0,1]");
  }
  if (rec.t != static_cast<std::int64_t>(records.size()) + 1) {
    throw std::invalid_argument("history: rounds must be appended in order");
  }
  records.push_back(rec);
  counts[static_cast<std::size_t>(rec.arm)] += 1;
}

double draw_reward(const BanditInstance& instance, int arm, RngStream& rng) {
  if (arm < 0 || arm >= instance.num_arms()) {
    throw std::invalid_argument("draw_reward: arm out of range");
  }
  const auto i = static_cast<std::size_t>(arm);
  return instance.means[i] + instance.std_devs[i] * rng.next_normal();
}

int optimal_arm(const BanditInstance& instance) {
  instance.validate();
  const auto& mu = instance.means;
  int best = 0;
  for (int i = 1; i < instance.num_arms(); ++i) {
    if (mu[static_cast<std::size_t>(i)] > mu[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  for (int i = 0; i < instance.num_arms(); ++i) {
    if (i != best && mu[static_cast<std::size_t>(i)] ==
                         mu[static_cast<std::size_t>(best)]) {
      throw std::invalid_argument("gaps: optimal arm not unique");
    }
  }
  return best;
}

std::vector<double> gaps(const BanditInstance& instance) {
  const int best = optimal_arm(instance);
  const double mu_star = instance.means[static_cast<std::size_t>(best)];
  std::vector<double> out(instance.means.size());
  for (std::size_t i = 0; i < instance.means.size(); ++i) {
    out[i] = mu_star - instance.means[i];
  }
  return out;
}

}  // namespace banditlab
