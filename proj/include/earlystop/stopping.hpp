#pragma once

#include <optional>
#include <vector>

#include "earlystop/risk.hpp"
#include "earlystop/schedule.hpp"
#include "earlystop/spectral.hpp"

namespace earlystop {

// Denominator of the cumulative-rate budget log(sigma2 Lambda_j / tau2 + 1) / rate:
// sample_eigenvalue uses lambda_j(Sigma_hat) = Lambda_j / n (the consistent
// pairing with phi's decay), gram_eigenvalue uses Lambda_j as printed in the
// aggregate-estimate display.
enum class RateDenominator { sample_eigenvalue, gram_eigenvalue };

// Continuous stopping point for one eigen-direction: the real x where the
// cumulative rate sum first covers the budget (linear within a step).
struct DirectionStop {
  int j = 0;
  double target_phi = 0.0;  // tau2 / (sigma2 Lambda_j + tau2)
  double k_real = 0.0;
  bool never = false;  // tau = 0, or budget unreachable within the cap
};

DirectionStop per_direction_stop(const SpectralData& sd, const ProblemSpec& spec,
                                 const Schedule& s, int j,
                                 RateDenominator rate = RateDenominator::sample_eigenvalue,
                                 long long k_cap = 100000000);

// Same construction at the mean of the nonzero sample eigenvalues.
struct AggregateStop {
  double mean_sample_eig = 0.0;
  double target_phi = 0.0;
  double k_real = 0.0;
  bool never = false;
};
AggregateStop aggregate_stop(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                             RateDenominator rate = RateDenominator::sample_eigenvalue,
                             long long k_cap = 100000000);

// Exhaustive integer argmin of the exact random-init risk over [0, k_max].
long long true_optimal_stop(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                            long long k_max);

// Reference criterion: smallest T <= k_max with
// sqrt((1/n) sum_i min(Lambda_i, 1/S_T)) > 1 / (2 e tau S_T), S_T = sum eta.
std::optional<long long> raskutti_stop(const SpectralData& sd, const ProblemSpec& spec,
                                       const Schedule& s, long long k_max);

struct StoppingReport {
  std::vector<DirectionStop> per_direction;
  AggregateStop aggregate;
  long long true_k = 0;
  long long estimate_k = 0;  // round(aggregate.k_real) clamped to [0, k_max]; k_max if never
  long long k_max = 0;
  double risk_at_true = 0.0;
  double risk_at_estimate = 0.0;
  std::optional<long long> raskutti_k;
};
StoppingReport make_stopping_report(const SpectralData& sd, const ProblemSpec& spec,
                                    const Schedule& s, long long k_max,
                                    RateDenominator rate = RateDenominator::sample_eigenvalue);

}  // namespace earlystop
