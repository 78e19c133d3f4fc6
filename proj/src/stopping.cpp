#include "earlystop/stopping.hpp"

#include <cmath>
#include <limits>

#include "earlystop/errors.hpp"

namespace earlystop {

namespace {

constexpr double kE = 2.71828182845904523536;

// Smallest real x with the piecewise-linear cumulative rate sum reaching
// budget; never if the cap is hit first or the schedule runs out.
std::pair<double, bool> cover_budget(const Schedule& s, double budget, long long k_cap) {
  if (budget <= 0.0) return {0.0, false};
  if (!std::isfinite(budget)) return {std::numeric_limits<double>::infinity(), true};
  double sum = 0.0;
  for (long long k = 1; k <= k_cap; ++k) {
    double eta;
    try {
      eta = s.eta_at(k);
    } catch (const std::domain_error&) {
      return {std::numeric_limits<double>::infinity(), true};  // AdditiveDecay exhausted
    }
    double next = sum + eta;
    if (next >= budget) return {static_cast<double>(k - 1) + (budget - sum) / eta, false};
    sum = next;
  }
  return {std::numeric_limits<double>::infinity(), true};
}

std::pair<double, double> target_and_budget(const ProblemSpec& spec, double gram_eig,
                                            double rate_denom) {
  double snr = spec.sigma2 * gram_eig / spec.tau2;
  double target = spec.tau2 / (spec.sigma2 * gram_eig + spec.tau2);
  double budget = std::log1p(snr) / rate_denom;
  return {target, budget};
}

}  // namespace

DirectionStop per_direction_stop(const SpectralData& sd, const ProblemSpec& spec,
                                 const Schedule& s, int j, RateDenominator rate,
                                 long long k_cap) {
  if (j < 0 || j >= sd.rank)
    throw validation_error("per_direction_stop: j must index a nonzero direction (j < rank)");
  if (spec.sigma2 <= 0.0) throw validation_error("per_direction_stop: sigma2 must be > 0");
  DirectionStop out;
  out.j = j;
  if (spec.tau2 == 0.0) {
    out.target_phi = 0.0;
    out.k_real = std::numeric_limits<double>::infinity();
    out.never = true;  // no noise: never stop
    return out;
  }
  double denom = rate == RateDenominator::sample_eigenvalue ? sd.sample_eig(j) : sd.Lambda(j);
  auto [target, budget] = target_and_budget(spec, sd.Lambda(j), denom);
  out.target_phi = target;
  auto [k_real, never] = cover_budget(s, budget, k_cap);
  out.k_real = k_real;
  out.never = never;
  return out;
}

AggregateStop aggregate_stop(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                             RateDenominator rate, long long k_cap) {
  if (sd.rank < 1) throw validation_error("aggregate_stop: rank must be >= 1");
  if (spec.sigma2 <= 0.0) throw validation_error("aggregate_stop: sigma2 must be > 0");
  AggregateStop out;
  double mean_gram = 0.0;
  for (int j = 0; j < sd.rank; ++j) mean_gram += sd.Lambda(j);
  mean_gram /= sd.rank;
  out.mean_sample_eig = mean_gram / sd.n;
  if (spec.tau2 == 0.0) {
    out.k_real = std::numeric_limits<double>::infinity();
    out.never = true;
    return out;
  }
  double denom = rate == RateDenominator::sample_eigenvalue ? out.mean_sample_eig : mean_gram;
  auto [target, budget] = target_and_budget(spec, mean_gram, denom);
  out.target_phi = target;
  auto [k_real, never] = cover_budget(s, budget, k_cap);
  out.k_real = k_real;
  out.never = never;
  return out;
}

long long true_optimal_stop(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                            long long k_max) {
  if (k_max < 0) throw validation_error("true_optimal_stop: k_max must be >= 0");
  RiskScan scan = risk_scan(sd, spec, s, k_max, InitMode::random_init);
  long long best = 0;
  for (long long k = 1; k <= k_max; ++k)
    if (scan.risk[static_cast<size_t>(k)] < scan.risk[static_cast<size_t>(best)]) best = k;
  return best;
}

std::optional<long long> raskutti_stop(const SpectralData& sd, const ProblemSpec& spec,
                                       const Schedule& s, long long k_max) {
  double tau = std::sqrt(spec.tau2);
  if (tau <= 0.0) return std::nullopt;
  // Eigenvalues of X X^T: the nonzero Gram spectrum padded with zeros to n.
  std::vector<double> lam(static_cast<size_t>(sd.n), 0.0);
  for (int i = 0; i < sd.n && i < sd.rank; ++i) lam[static_cast<size_t>(i)] = sd.Lambda(i);
  double sum_eta = 0.0;
  for (long long T = 1; T <= k_max; ++T) {
    sum_eta += s.eta_at(T);
    double inv = 1.0 / sum_eta;
    double acc = 0.0;
    for (double l : lam) acc += std::min(l, inv);
    double lhs = std::sqrt(acc / sd.n);
    double rhs = 1.0 / (2.0 * kE * tau * sum_eta);
    if (lhs > rhs) return T;
  }
  return std::nullopt;
}

StoppingReport make_stopping_report(const SpectralData& sd, const ProblemSpec& spec,
                                    const Schedule& s, long long k_max, RateDenominator rate) {
  StoppingReport rep;
  rep.k_max = k_max;
  for (int j = 0; j < sd.rank; ++j)
    rep.per_direction.push_back(per_direction_stop(sd, spec, s, j, rate));
  rep.aggregate = aggregate_stop(sd, spec, s, rate);

  RiskScan scan = risk_scan(sd, spec, s, k_max, InitMode::random_init);
  rep.true_k = 0;
  for (long long k = 1; k <= k_max; ++k)
    if (scan.risk[static_cast<size_t>(k)] < scan.risk[static_cast<size_t>(rep.true_k)])
      rep.true_k = k;
  rep.risk_at_true = scan.risk[static_cast<size_t>(rep.true_k)];

  long long est = rep.aggregate.never ? k_max
                                      : std::llround(std::min(rep.aggregate.k_real,
                                                              static_cast<double>(k_max)));
  est = std::max<long long>(0, std::min(est, k_max));
  rep.estimate_k = est;
  rep.risk_at_estimate = scan.risk[static_cast<size_t>(est)];
  rep.raskutti_k = raskutti_stop(sd, spec, s, k_max);
  return rep;
}

}  // namespace earlystop
