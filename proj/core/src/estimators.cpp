#include "banditlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace banditlab {

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::SampleMean: return "sample_mean";
    case EstimatorKind::HT:         return "ht";
    case EstimatorKind::PCIPW:      return "pcipw";
  }
  return "?";
}

EstimateVector sample_mean(const RunHistory& history) {
  const int k = history.num_arms;
  std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
  for (const auto& rec : history.records) {
    sums[static_cast<std::size_t>(rec.arm)] += rec.reward;
  }
  EstimateVector out;
  out.kind = EstimatorKind::SampleMean;
  out.estimates.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto n = history.counts[static_cast<std::size_t>(i)];
    if (n == 0) {
      throw std::runtime_error("sample_mean: no samples for arm " +
                               std::to_string(i));
    }
    out.estimates[static_cast<std::size_t>(i)] =
        sums[static_cast<std::size_t>(i)] / static_cast<double>(n);
  }
  return out;
}

double sample_mean(const RunHistory& history, int arm) {
  if (arm < 0 || arm >= history.num_arms) {
    throw std::invalid_argument("sample_mean: arm out of range");
  }
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& rec : history.records) {
    if (rec.arm == arm) {
      sum += rec.reward;
      ++n;
    }
  }
  if (n == 0) {
    throw std::runtime_error("sample_mean: no samples for arm " +
                             std::to_string(arm));
  }
  return sum / static_cast<double>(n);
}

PilotSummary pilot_summary(const RunHistory& history,
                           std::int64_t pilot_rounds) {
  const int k = history.num_arms;
  if (k <= 0) throw std::invalid_argument("pilot_summary: empty history");
  if (pilot_rounds <= 0 || pilot_rounds % k != 0) {
    throw std::invalid_argument(
        "pilot_summary: pilot_rounds must be a positive multiple of K");
  }
  const std::int64_t n1 = pilot_rounds / k;
  if (n1 < 2) {
    throw std::invalid_argument(
        "pilot_summary: pilot sd needs at least 2 pulls per arm");
  }
  if (history.horizon() < pilot_rounds) {
    throw std::invalid_argument(
        "pilot_summary: history shorter than pilot_rounds");
  }

  std::vector<std::int64_t> n(static_cast<std::size_t>(k), 0);
  std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
  for (std::int64_t t = 0; t < pilot_rounds; ++t) {
    const auto& rec = history.records[static_cast<std::size_t>(t)];
    n[static_cast<std::size_t>(rec.arm)] += 1;
    sum[static_cast<std::size_t>(rec.arm)] += rec.reward;
  }
  for (int i = 0; i < k; ++i) {
    if (n[static_cast<std::size_t>(i)] != n1) {
      throw std::invalid_argument(
          "pilot_summary: first rounds do not form a balanced pilot");
    }
  }

  PilotSummary out;
  out.n1 = n1;
  out.pilot_means.resize(static_cast<std::size_t>(k));
  out.pilot_sds.assign(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    out.pilot_means[static_cast<std::size_t>(i)] =
        sum[static_cast<std::size_t>(i)] / static_cast<double>(n1);
  }
  for (std::int64_t t = 0; t < pilot_rounds; ++t) {
    const auto& rec = history.records[static_cast<std::size_t>(t)];
    const double dev =
        rec.reward - out.pilot_means[static_cast<std::size_t>(rec.arm)];
    out.pilot_sds[static_cast<std::size_t>(rec.arm)] += dev * dev;
  }
  for (int i = 0; i < k; ++i) {
    out.pilot_sds[static_cast<std::size_t>(i)] = std::sqrt(
        out.pilot_sds[static_cast<std::size_t>(i)] /
        static_cast<double>(n1 - 1));
  }
  return out;
}

EstimateVector ht_estimate(const RunHistory& history) {
  const int k = history.num_arms;
  const double n = static_cast<double>(history.horizon());
  if (n == 0.0) throw std::invalid_argument("ht_estimate: empty history");
  EstimateVector out;
  out.kind = EstimatorKind::HT;
  out.estimates.assign(static_cast<std::size_t>(k), 0.0);
  for (const auto& rec : history.records) {
    if (!(rec.assign_prob > 0.0 && rec.assign_prob <= 1.0)) {
      throw std::invalid_argument("ht_estimate: assign_prob outside (0,1]");
    }
    out.estimates[static_cast<std::size_t>(rec.arm)] +=
        rec.reward / rec.assign_prob;
  }
  for (double& e : out.estimates) e /= n;
  return out;
}

EstimateVector pcipw_estimate(const RunHistory& history,
                              const PilotSummary& pilot) {
  const int k = history.num_arms;
  if (static_cast<int>(pilot.pilot_means.size()) != k) {
    throw std::invalid_argument("pcipw_estimate: pilot/history arm mismatch");
  }
  const std::int64_t n1_total = pilot.n1 * k;
  const double n = static_cast<double>(history.horizon());
  if (history.horizon() < n1_total) {
    throw std::invalid_argument(
        "pcipw_estimate: history shorter than its pilot");
  }
  // The pilot rounds of the centered sum cancel exactly, so only tail rounds
  // are accumulated.
  EstimateVector out;
  out.kind = EstimatorKind::PCIPW;
  out.estimates = pilot.pilot_means;
  for (std::int64_t t = n1_total; t < history.horizon(); ++t) {
    const auto& rec = history.records[static_cast<std::size_t>(t)];
    if (!(rec.assign_prob > 0.0 && rec.assign_prob <= 1.0)) {
      throw std::invalid_argument("pcipw_estimate: assign_prob outside (0,1]");
    }
    const auto i = static_cast<std::size_t>(rec.arm);
    out.estimates[i] +=
        (rec.reward - pilot.pilot_means[i]) / rec.assign_prob / n;
  }
  return out;
}

std::vector<double> floored_sds(const std::vector<double>& sds) {
  if (sds.empty()) throw std::invalid_argument("floored_sds: empty input");
  double max_sd = 0.0;
  for (double s : sds) {
    if (!(s >= 0.0)) throw std::invalid_argument("floored_sds: sd < 0");
    max_sd = std::max(max_sd, s);
  }
  std::vector<double> out(sds.size());
  if (max_sd <= 0.0) {
    // No spread measured anywhere: degrade to equal weights upstream.
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  const double floor = kSigmaFloorScale * max_sd;
  for (std::size_t i = 0; i < sds.size(); ++i) {
    out[i] = std::max(sds[i], floor);
  }
  return out;
}

namespace {

std::vector<double> normalized_powers(const std::vector<double>& sds,
                                      double exponent) {
  std::vector<double> w = floored_sds(sds);
  double total = 0.0;
  for (double& x : w) {
    x = std::pow(x, exponent);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

std::vector<double> neyman_weights(const std::vector<double>& sds) {
  return normalized_powers(sds, 1.0);
}

std::vector<double> rooted_neyman_weights(const std::vector<double>& sds) {
  return normalized_powers(sds, 2.0 / 3.0);
}

void TwoStageDesign::validate(int num_arms) const {
  if (num_arms <= 0) {
    throw std::invalid_argument("two-stage design: needs at least one arm");
  }
  if (pilot_rounds <= 0 || pilot_rounds % num_arms != 0) {
    throw std::invalid_argument(
        "two-stage design: pilot_rounds must be a positive multiple of K");
  }
  if (pilot_rounds / num_arms < 2) {
    throw std::invalid_argument(
        "two-stage design: pilot needs at least 2 pulls per arm");
  }
  if (pilot_rounds > horizon) {
    throw std::invalid_argument(
        "two-stage design: pilot_rounds must not exceed the horizon");
  }
}

namespace {

struct Welford {
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t n = 0;

  void push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  DecompositionTerm term() const {
    DecompositionTerm t;
    t.value = mean;
    if (n > 1) {
      t.se = std::sqrt(m2 / static_cast<double>(n - 1) /
                       static_cast<double>(n));
    }
    return t;
  }
};

}  // namespace

MseDecomposition mse_decomposition(const BanditInstance& instance,
                                   const TwoStageDesign& design,
                                   EstimatorKind kind, std::int64_t mc_reps,
                                   std::uint64_t base_seed) {
  instance.validate();
  const int k = instance.num_arms();
  design.validate(k);
  if (kind == EstimatorKind::SampleMean) {
    throw std::invalid_argument(
        "mse_decomposition: only ht and pcipw decompose this way");
  }
  if (mc_reps < 1000) {
    throw std::invalid_argument("mse_decomposition: mc_reps must be >= 1000");
  }

  const std::int64_t n1 = design.pilot_rounds / k;
  const double n_total = static_cast<double>(design.horizon);
  const double n1_frac = static_cast<double>(design.pilot_rounds) / n_total;
  const double tail_rounds =
      static_cast<double>(design.horizon - design.pilot_rounds);
  const double tail_scale = tail_rounds / (n_total * n_total);

  struct ArmAcc {
    Welford sq, t1, t2, t3, gap;
  };
  std::vector<ArmAcc> acc(static_cast<std::size_t>(k));

  std::vector<double> pm(static_cast<std::size_t>(k));
  std::vector<double> psd(static_cast<std::size_t>(k));
  std::vector<double> m2(static_cast<std::size_t>(k));
  std::vector<double> tail_sum(static_cast<std::size_t>(k));

  for (std::int64_t rep = 0; rep < mc_reps; ++rep) {
    RngStream rng = derive_stream(base_seed, static_cast<std::uint64_t>(rep));

    // Stage 1: blocked pilot, arm 0 first; rewards only (deterministic arm).
    for (int a = 0; a < k; ++a) {
      double mean = 0.0, sq = 0.0;
      for (std::int64_t j = 0; j < n1; ++j) {
        const double x = draw_reward(instance, a, rng);
        const double d = x - mean;
        mean += d / static_cast<double>(j + 1);
        sq += d * (x - mean);
      }
      pm[static_cast<std::size_t>(a)] = mean;
      m2[static_cast<std::size_t>(a)] = sq;
    }
    for (int a = 0; a < k; ++a) {
      psd[static_cast<std::size_t>(a)] = std::sqrt(
          m2[static_cast<std::size_t>(a)] / static_cast<double>(n1 - 1));
    }
    const std::vector<double> w = neyman_weights(psd);

    // Stage 2: i.i.d. draws from the estimated allocation.
    std::fill(tail_sum.begin(), tail_sum.end(), 0.0);
    for (std::int64_t t = design.pilot_rounds; t < design.horizon; ++t) {
      const int a = sample_categorical(w, rng.next_unit());
      const double x = draw_reward(instance, a, rng);
      const auto ai = static_cast<std::size_t>(a);
      if (kind == EstimatorKind::PCIPW) {
        tail_sum[ai] += (x - pm[ai]) / w[ai];
      } else {
        tail_sum[ai] += x / w[ai];
      }
    }

    for (int a = 0; a < k; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      const double mu = instance.means[ai];
      const double var = instance.std_devs[ai] * instance.std_devs[ai];
      const double pilot_err = pm[ai] - mu;
      double est, t2, t3;
      if (kind == EstimatorKind::PCIPW) {
        est = pm[ai] + tail_sum[ai] / n_total;
        t2 = tail_scale * var / w[ai];
        t3 = tail_scale * pilot_err * pilot_err * (1.0 / w[ai] - 1.0);
      } else {
        est = (static_cast<double>(design.pilot_rounds) * pm[ai] +
               tail_sum[ai]) /
              n_total;
        t2 = tail_scale * ((mu * mu + var) / w[ai] - mu * mu);
        t3 = 0.0;
      }
      const double t1 = n1_frac * n1_frac * pilot_err * pilot_err;
      const double sq = (est - mu) * (est - mu);
      acc[ai].sq.push(sq);
      acc[ai].t1.push(t1);
      acc[ai].t2.push(t2);
      acc[ai].t3.push(t3);
      acc[ai].gap.push(sq - t1 - t2 - t3);
    }
  }

  MseDecomposition out;
  out.kind = kind;
  out.reps = mc_reps;
  out.arms.resize(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    const auto ai = static_cast<std::size_t>(a);
    out.arms[ai].mse = acc[ai].sq.term();
    out.arms[ai].pilot_term = acc[ai].t1.term();
    out.arms[ai].sampling_term = acc[ai].t2.term();
    out.arms[ai].shift_term = acc[ai].t3.term();
    out.arms[ai].identity_gap = acc[ai].gap.term();
  }
  return out;
}

}  // namespace banditlab
