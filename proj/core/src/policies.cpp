#include "banditlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "banditlab/oracle.hpp"

namespace banditlab {

const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Uniform:      return "uniform";
    case PolicyKind::TwoStageAN:   return "two_stage_an";
    case PolicyKind::OracleStatic: return "oracle";
    case PolicyKind::SARP:         return "sarp";
    case PolicyKind::NARP:         return "narp";
  }
  return "?";
}

const char* alg_name(AlgKind k) {
  switch (k) {
    case AlgKind::ThompsonGaussian: return "thompson";
    case AlgKind::UCB1:             return "ucb1";
  }
  return "?";
}

namespace {

int uniform_arm(int k, double u) {
  const int a = static_cast<int>(u * static_cast<double>(k));
  return a >= k ? k - 1 : a;
}

struct ArmStats {
  std::vector<std::int64_t> n;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit ArmStats(int k)
      : n(static_cast<std::size_t>(k), 0),
        mean(static_cast<std::size_t>(k), 0.0),
        m2(static_cast<std::size_t>(k), 0.0) {}

  void push(int arm, double x) {
    const auto i = static_cast<std::size_t>(arm);
    n[i] += 1;
    const double d = x - mean[i];
    mean[i] += d / static_cast<double>(n[i]);
    m2[i] += d * (x - mean[i]);
  }

  double sd(int arm) const {
    const auto i = static_cast<std::size_t>(arm);
    if (n[i] < 2) return 0.0;
    return std::sqrt(m2[i] / static_cast<double>(n[i] - 1));
  }

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto x : n) s += x;
    return s;
  }
};

// ---------------------------------------------------------------- delegates

class ThompsonAlg final : public Alg {
 public:
  ThompsonAlg(int k, double scale) : stats_(k), scale_(scale) {}

  int choose(std::int64_t /*t*/, RngStream& rng) override {
    // Exactly K normal draws, arm order, regardless of state.
    int best = 0;
    double best_theta = 0.0;
    const int k = static_cast<int>(stats_.n.size());
    for (int i = 0; i < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double n_i =
          static_cast<double>(std::max<std::int64_t>(1, stats_.n[ii]));
      const double theta =
          stats_.mean[ii] + scale_ / std::sqrt(n_i) * rng.next_normal();
      if (i == 0 || theta > best_theta) {
        best = i;
        best_theta = theta;
      }
    }
    return best;
  }

  bool deterministic() const override { return false; }

  int peek(std::int64_t /*t*/) const override {
    throw std::logic_error("thompson: no deterministic peek");
  }

  void update(int arm, double reward) override { stats_.push(arm, reward); }

 private:
  ArmStats stats_;
  double scale_;
};

class Ucb1Alg final : public Alg {
 public:
  Ucb1Alg(int k, double c) : stats_(k), c_(c) {}

  int choose(std::int64_t t, RngStream& /*rng*/) override { return peek(t); }

  bool deterministic() const override { return true; }

  int peek(std::int64_t /*t*/) const override {
    const int k = static_cast<int>(stats_.n.size());
    for (int i = 0; i < k; ++i) {
      if (stats_.n[static_cast<std::size_t>(i)] == 0) return i;  // by index
    }
    const double total = static_cast<double>(stats_.total());
    const double log_total = std::log(std::max(1.0, total));
    int best = 0;
    double best_index = 0.0;
    for (int i = 0; i < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double idx =
          stats_.mean[ii] +
          c_ * std::sqrt(2.0 * log_total / static_cast<double>(stats_.n[ii]));
      if (i == 0 || idx > best_index) {  // ties go to the lowest index
        best = i;
        best_index = idx;
      }
    }
    return best;
  }

  void update(int arm, double reward) override { stats_.push(arm, reward); }

 private:
  ArmStats stats_;
  double c_;
};

// ----------------------------------------------------------------- policies

class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(int k) : k_(k) {}

  ActionDecision decide(std::int64_t /*t*/, RngStream& rng) override {
    const int arm = uniform_arm(k_, rng.next_unit());
    return {arm, 1.0 / static_cast<double>(k_), Branch::Explore};
  }

  void observe(const ActionDecision&, double) override {}
  PolicyKind kind() const override { return PolicyKind::Uniform; }

 private:
  int k_;
};

class TwoStagePolicy final : public Policy {
 public:
  TwoStagePolicy(int k, std::int64_t pilot_rounds)
      : k_(k),
        pilot_rounds_(pilot_rounds),
        per_arm_(pilot_rounds / k),
        stats_(k) {}

  ActionDecision decide(std::int64_t t, RngStream& rng) override {
    if (t <= pilot_rounds_) {
      // Blocked pilot: arm 0 for the first n1 rounds, then arm 1, ...
      const int arm = static_cast<int>((t - 1) / per_arm_);
      return {arm, 1.0 / static_cast<double>(k_), Branch::Pilot};
    }
    if (weights_.empty()) {
      std::vector<double> sds(static_cast<std::size_t>(k_));
      for (int i = 0; i < k_; ++i) {
        sds[static_cast<std::size_t>(i)] = stats_.sd(i);
      }
      weights_ = neyman_weights(sds);
    }
    const int arm = sample_categorical(weights_, rng.next_unit());
    return {arm, weights_[static_cast<std::size_t>(arm)], Branch::Explore};
  }

  void observe(const ActionDecision& decision, double reward) override {
    if (decision.branch == Branch::Pilot) stats_.push(decision.arm, reward);
  }

  PolicyKind kind() const override { return PolicyKind::TwoStageAN; }

 private:
  int k_;
  std::int64_t pilot_rounds_;
  std::int64_t per_arm_;
  ArmStats stats_;
  std::vector<double> weights_;
};

class OracleStaticPolicy final : public Policy {
 public:
  explicit OracleStaticPolicy(std::vector<double> p) : p_(std::move(p)) {}

  ActionDecision decide(std::int64_t /*t*/, RngStream& rng) override {
    const int arm = sample_categorical(p_, rng.next_unit());
    return {arm, p_[static_cast<std::size_t>(arm)], Branch::Explore};
  }

  void observe(const ActionDecision&, double) override {}
  PolicyKind kind() const override { return PolicyKind::OracleStatic; }

 private:
  std::vector<double> p_;
};

// Shared explore/exploit mechanics of the two mixture policies.
ActionDecision mixture_round(double x, const std::vector<double>& explore_dist,
                             Alg& alg, std::int64_t t, RngStream& rng) {
  // For a deterministic delegate the exploit choice is known before the
  // coin, so the recorded probability is the exact mixture on both branches.
  const int exploit_peek = alg.deterministic() ? alg.peek(t) : -1;
  const double coin = rng.next_unit();
  if (coin < x) {
    const int arm = sample_categorical(explore_dist, rng.next_unit());
    double prob = x * explore_dist[static_cast<std::size_t>(arm)];
    if (arm == exploit_peek) prob += 1.0 - x;
    return {arm, prob, Branch::Explore};
  }
  const int arm =
      alg.deterministic() ? exploit_peek : alg.choose(t, rng);
  const double prob =
      x * explore_dist[static_cast<std::size_t>(arm)] + (1.0 - x);
  return {arm, prob, Branch::Exploit};
}

class SarpPolicy final : public Policy {
 public:
  SarpPolicy(int k, double c_x, std::vector<double> p0,
             std::unique_ptr<Alg> alg, bool alg_sees_all)
      : k_(k),
        c_x_(c_x),
        p0_(std::move(p0)),
        alg_(std::move(alg)),
        alg_sees_all_(alg_sees_all) {}

  ActionDecision decide(std::int64_t t, RngStream& rng) override {
    if (t <= k_) {
      return {static_cast<int>(t - 1), 1.0, Branch::Warmup};
    }
    const double x =
        std::min(1.0, c_x_ * std::pow(static_cast<double>(t), -1.0 / 3.0));
    return mixture_round(x, p0_, *alg_, t, rng);
  }

  void observe(const ActionDecision& decision, double reward) override {
    if (alg_sees_all_ || decision.branch == Branch::Warmup ||
        decision.branch == Branch::Exploit) {
      alg_->update(decision.arm, reward);
    }
  }

  PolicyKind kind() const override { return PolicyKind::SARP; }

 private:
  int k_;
  double c_x_;
  std::vector<double> p0_;
  std::unique_ptr<Alg> alg_;
  bool alg_sees_all_;
};

class NarpPolicy final : public Policy {
 public:
  NarpPolicy(int k, std::int64_t m0, double alpha, double lambda,
             std::unique_ptr<Alg> alg, bool alg_sees_all)
      : k_(k),
        m0_(m0),
        alpha_(alpha),
        lambda_(lambda),
        alg_(std::move(alg)),
        alg_sees_all_(alg_sees_all),
        stats_(k) {}

  ActionDecision decide(std::int64_t t, RngStream& rng) override {
    if (t <= m0_ * k_) {
      return {static_cast<int>((t - 1) % k_), 1.0, Branch::Warmup};
    }

    // Forced floor: the least-sampled arm (lowest index on ties) must keep
    // at least m0 + ceil(alpha sqrt(t)) pulls.
    int least = 0;
    for (int i = 1; i < k_; ++i) {
      if (stats_.n[static_cast<std::size_t>(i)] <
          stats_.n[static_cast<std::size_t>(least)]) {
        least = i;
      }
    }
    const auto floor_target =
        m0_ + static_cast<std::int64_t>(
                  std::ceil(alpha_ * std::sqrt(static_cast<double>(t))));
    if (stats_.n[static_cast<std::size_t>(least)] < floor_target) {
      return {least, 1.0, Branch::Forced};
    }

    // Plug-in estimates from all data so far (every arm has >= m0 >= 2).
    std::vector<double> sds(static_cast<std::size_t>(k_));
    for (int i = 0; i < k_; ++i) {
      sds[static_cast<std::size_t>(i)] = stats_.sd(i);
    }
    const std::vector<double> fl = floored_sds(sds);
    const std::vector<double> w = rooted_neyman_weights(sds);

    int i_star = 0;
    for (int i = 1; i < k_; ++i) {
      if (stats_.mean[static_cast<std::size_t>(i)] >
          stats_.mean[static_cast<std::size_t>(i_star)]) {
        i_star = i;
      }
    }
    double m_hat = 0.0;
    double l_hat = 0.0;
    for (int i = 0; i < k_; ++i) {
      if (i == i_star) continue;
      const auto ii = static_cast<std::size_t>(i);
      m_hat += fl[ii] / std::sqrt(w[ii]);
      const double gap = std::max(
          0.0, stats_.mean[static_cast<std::size_t>(i_star)] - stats_.mean[ii]);
      l_hat += gap * w[ii];
    }
    double x = 1.0;
    if (l_hat > 0.0) {
      const double ratio = lambda_ * m_hat / ((1.0 - lambda_) * l_hat);
      x = std::min(1.0, std::cbrt(ratio * ratio) *
                            std::pow(static_cast<double>(t), -1.0 / 3.0));
    }
    return mixture_round(x, w, *alg_, t, rng);
  }

  void observe(const ActionDecision& decision, double reward) override {
    stats_.push(decision.arm, reward);
    if (alg_sees_all_ || decision.branch == Branch::Warmup ||
        decision.branch == Branch::Exploit) {
      alg_->update(decision.arm, reward);
    }
  }

  PolicyKind kind() const override { return PolicyKind::NARP; }

 private:
  int k_;
  std::int64_t m0_;
  double alpha_;
  double lambda_;
  std::unique_ptr<Alg> alg_;
  bool alg_sees_all_;
  ArmStats stats_;
};

}  // namespace

std::unique_ptr<Alg> make_alg(const AlgSpec& spec, int num_arms) {
  if (num_arms < 1) throw std::invalid_argument("make_alg: needs arms");
  switch (spec.kind) {
    case AlgKind::ThompsonGaussian:
      if (!(spec.thompson_scale > 0.0)) {
        throw std::invalid_argument("alg: thompson_scale must be > 0");
      }
      return std::make_unique<ThompsonAlg>(num_arms, spec.thompson_scale);
    case AlgKind::UCB1:
      if (!(spec.ucb_c >= 0.0)) {
        throw std::invalid_argument("alg: ucb_c must be >= 0");
      }
      return std::make_unique<Ucb1Alg>(num_arms, spec.ucb_c);
  }
  throw std::invalid_argument("alg: unknown kind");
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const BanditInstance& instance,
                                    std::int64_t horizon) {
  instance.validate();
  if (horizon < 1) {
    throw std::invalid_argument("make_policy: horizon must be >= 1");
  }
  const int k = instance.num_arms();

  switch (spec.kind) {
    case PolicyKind::Uniform:
      return std::make_unique<UniformPolicy>(k);

    case PolicyKind::TwoStageAN: {
      TwoStageDesign design{horizon, spec.pilot_rounds};
      design.validate(k);
      return std::make_unique<TwoStagePolicy>(k, spec.pilot_rounds);
    }

    case PolicyKind::OracleStatic: {
      const JointProblem pr =
          joint_problem_from_instance(instance, spec.lambda, horizon);
      OracleSolution sol = solve_oracle(pr);
      return std::make_unique<OracleStaticPolicy>(std::move(sol.p_star));
    }

    case PolicyKind::SARP: {
      if (k < 2) throw std::invalid_argument("sarp: needs at least two arms");
      if (!(spec.c_x > 0.0)) {
        throw std::invalid_argument("sarp: c_x must be > 0");
      }
      std::vector<double> p0 = spec.p0;
      if (p0.empty()) {
        p0.assign(static_cast<std::size_t>(k),
                  1.0 / static_cast<double>(k));
      } else {
        if (static_cast<int>(p0.size()) != k) {
          throw std::invalid_argument("sarp: p0 must have one entry per arm");
        }
        double sum = 0.0;
        for (double w : p0) {
          if (!(w > 0.0)) {
            throw std::invalid_argument("sarp: p0 must be strictly positive");
          }
          sum += w;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
          throw std::invalid_argument("sarp: p0 must sum to 1");
        }
        for (double& w : p0) w /= sum;
      }
      return std::make_unique<SarpPolicy>(k, spec.c_x, std::move(p0),
                                          make_alg(spec.alg, k),
                                          spec.alg_sees_all_data);
    }

    case PolicyKind::NARP: {
      if (k < 2) throw std::invalid_argument("narp: needs at least two arms");
      if (spec.m0 < 2) throw std::invalid_argument("narp: m0 must be >= 2");
      if (!(spec.alpha > 0.0)) {
        throw std::invalid_argument("narp: alpha must be > 0");
      }
      if (!(spec.lambda > 0.0 && spec.lambda < 1.0)) {
        throw std::invalid_argument(
            "narp: lambda must lie strictly inside (0,1)");
      }
      return std::make_unique<NarpPolicy>(k, spec.m0, spec.alpha, spec.lambda,
                                          make_alg(spec.alg, k),
                                          spec.alg_sees_all_data);
    }
  }
  throw std::invalid_argument("make_policy: unknown policy kind");
}

}  // namespace banditlab
