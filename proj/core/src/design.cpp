#include "banditlab/design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace banditlab {

double VarianceProfile::sum_sigma() const {
  double s = 0.0;
  for (double x : sigmas) s += x;
  return s;
}

double VarianceProfile::sum_variance() const {
  double v = 0.0;
  for (double x : sigmas) v += x * x;
  return v;
}

void VarianceProfile::validate() const {
  if (sigmas.empty()) {
    throw std::invalid_argument("variance profile: needs at least one arm");
  }
  for (double x : sigmas) {
    if (!(x > 0.0)) {
      throw std::invalid_argument("variance profile: sigmas must be > 0");
    }
  }
}

// Lanczos approximation, g = 7, 9 coefficients. Relative error on Gamma is
// ~1e-15 on the real axis, which keeps beta_nu well within 1e-12 relative
// over the pilot sizes this calculator ever scans.
double log_gamma(double x) {
  if (!(x >= 0.5)) {
    throw std::domain_error("log_gamma: requires x >= 0.5");
  }
  static const double g = 7.0;
  static const double coef[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  const double z = x - 1.0;
  double series = coef[0];
  for (int i = 1; i < 9; ++i) {
    series += coef[i] / (z + static_cast<double>(i));
  }
  const double t = z + g + 0.5;
  // ln sqrt(2 pi)
  static const double half_log_two_pi = 0.91893853320467274178;
  return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

double beta_nu(double nu) {
  if (!(nu > 1.0)) {
    throw std::domain_error(
        "beta_nu: divergent moment, needs nu > 1");
  }
  const double lg = log_gamma((nu + 1.0) / 2.0) +
                    log_gamma((nu - 1.0) / 2.0) - 2.0 * log_gamma(nu / 2.0);
  return std::exp(lg);
}

double uniform_total_mse(const VarianceProfile& profile,
                         std::int64_t horizon) {
  profile.validate();
  if (horizon < profile.num_arms()) {
    throw std::invalid_argument(
        "uniform_total_mse: horizon must be at least K");
  }
  return static_cast<double>(profile.num_arms()) * profile.sum_variance() /
         static_cast<double>(horizon);
}

double neyman_total_mse(const VarianceProfile& profile, std::int64_t horizon) {
  profile.validate();
  if (horizon < profile.num_arms()) {
    throw std::invalid_argument(
        "neyman_total_mse: horizon must be at least K");
  }
  const double s = profile.sum_sigma();
  return s * s / static_cast<double>(horizon);
}

double oracle_gain_pct(const VarianceProfile& profile) {
  profile.validate();
  if (profile.num_arms() < 2) {
    throw std::invalid_argument("oracle_gain: K must be >= 2");
  }
  const double s = profile.sum_sigma();
  return 100.0 * (1.0 - s * s / (static_cast<double>(profile.num_arms()) *
                                 profile.sum_variance()));
}

namespace {

// (K-1) V / (S^2 - V); the pilot-size-free part of the threshold.
double condition_ratio(const VarianceProfile& profile) {
  const double s = profile.sum_sigma();
  const double v = profile.sum_variance();
  const double denom = s * s - v;
  if (!(denom > 0.0)) {
    // Only possible for K == 1 (Cauchy-Schwarz gives S^2 >= V with equality
    // iff a single arm carries all the mass).
    throw std::invalid_argument(
        "threshold condition: needs at least two arms with positive sigma");
  }
  return static_cast<double>(profile.num_arms() - 1) * v / denom;
}

}  // namespace

ExactCondition exact_condition_holds(const VarianceProfile& profile,
                                     std::int64_t pilot_rounds) {
  profile.validate();
  const int k = profile.num_arms();
  if (pilot_rounds <= 0 || pilot_rounds % k != 0 || pilot_rounds / k < 2) {
    throw std::invalid_argument(
        "exact condition: pilot_rounds must be a multiple of K with at "
        "least 2 pulls per arm");
  }
  const double nu = static_cast<double>(pilot_rounds / k - 1);
  ExactCondition out;
  out.rhs = condition_ratio(profile) /
            (1.0 + static_cast<double>(k) / static_cast<double>(pilot_rounds));
  if (nu <= 1.0) {
    // One degree of freedom: E sqrt(F) diverges, so no finite rhs passes.
    out.beta = std::numeric_limits<double>::infinity();
    out.holds = false;
    return out;
  }
  out.beta = beta_nu(nu);
  out.holds = out.beta <= out.rhs;
  return out;
}

bool sufficient_condition_holds(const VarianceProfile& profile,
                                std::int64_t pilot_rounds) {
  profile.validate();
  const int k = profile.num_arms();
  if (pilot_rounds <= 0 || pilot_rounds % k != 0) {
    throw std::invalid_argument(
        "sufficient condition: pilot_rounds must be a positive multiple of K");
  }
  if (pilot_rounds <= 3 * k) {
    throw std::domain_error(
        "sufficient condition: defined only for pilot_rounds > 3K");
  }
  const double n1 = static_cast<double>(pilot_rounds);
  const double kd = static_cast<double>(k);
  const double lhs =
      (1.0 + kd / n1) * std::sqrt((n1 - kd) / (n1 - 3.0 * kd));
  return lhs <= condition_ratio(profile);
}

ThresholdReport min_pilot_size(const VarianceProfile& profile,
                               std::int64_t max_multiple) {
  profile.validate();
  const int k = profile.num_arms();
  if (k < 2) {
    throw std::invalid_argument("min_pilot_size: K must be >= 2");
  }
  if (max_multiple < 3) {
    throw std::invalid_argument("min_pilot_size: scan bound below 3K");
  }

  ThresholdReport report;
  report.oracle_gain_pct = oracle_gain_pct(profile);
  report.ratio_rhs = condition_ratio(profile);

  for (std::int64_t m = 3; m <= max_multiple; ++m) {
    const std::int64_t n1 = m * k;
    const ExactCondition cond = exact_condition_holds(profile, n1);
    report.per_candidate.push_back(
        {n1, cond.beta, cond.rhs, cond.holds});
    if (cond.holds) {
      report.n1_min = n1;
      break;  // first pass wins; later candidates are not evaluated
    }
  }
  return report;
}

}  // namespace banditlab
