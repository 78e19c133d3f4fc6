#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "earlystop/schedule.hpp"
#include "earlystop/spectral.hpp"

namespace earlystop {

// fixed_init: beta0 is the given vector; bias uses beta0 - beta_star.
// random_init: beta0 - beta_star has iid mean-0 entries of variance sigma2,
// and every formula below is the exact expectation over that draw.
enum class InitMode { fixed_init, random_init };
enum class NoiseKind { gaussian, rademacher };

double excess_risk_of(const ProblemSpec& spec, const Eigen::VectorXd& beta);

// Exact expected excess risk under noise (and init, in random_init mode) at
// every k = 0..k_max; lambda must be 0. risk = bias + variance pointwise.
struct RiskScan {
  std::vector<double> risk, bias, variance;
};
RiskScan risk_scan(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                   long long k_max, InitMode mode);

struct RiskCurve {
  std::vector<long long> ks;
  std::vector<double> risk, bias, variance;
  std::vector<double> mc_mean, mc_stderr;  // empty unless an MC overlay was attached
  std::string meta;
};
RiskCurve risk_curve_analytic(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                              const std::vector<long long>& ks, InitMode mode);

// Realized excess risk of the exact trajectory for the y stored in sd
// (no expectation); works for any lambda.
std::vector<double> risk_curve_empirical(const SpectralData& sd, const ProblemSpec& spec,
                                         const Schedule& s, const std::vector<long long>& ks);

struct McRisk {
  double mean = 0.0;
  double se = 0.0;
};
// Literal gradient-descent Monte Carlo; trial t draws from sub-stream
// (seed, trial-base + t), so the estimate is independent of evaluation order.
// ks must be sorted ascending.
std::vector<McRisk> mc_risk_curve(const SpectralData& sd, const ProblemSpec& spec,
                                  const Schedule& s, const std::vector<long long>& ks, int trials,
                                  std::uint64_t seed, InitMode mode,
                                  NoiseKind noise = NoiseKind::gaussian);
McRisk mc_risk(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s, long long k,
               int trials, std::uint64_t seed, InitMode mode,
               NoiseKind noise = NoiseKind::gaussian);

// Early stopping helps direction j iff lim_k phi(k; lambda_j) stays strictly
// below tau^2 / (Lambda_j w_j + tau^2), w_j the squared init error (fixed) or
// sigma2 (random). Requires lambda = 0 and eta_sup <= 1 / lambda_max(Sigma_hat);
// fixed_init additionally requires V^T Sigma_test V diagonal.
struct CoordinateBenefit {
  int j;
  double limit;
  double threshold;
  bool satisfied;  // limit < threshold strictly
};
enum class BenefitVerdict { beneficial, not_beneficial, indeterminate };
struct BenefitReport {
  std::vector<CoordinateBenefit> coords;
  BenefitVerdict verdict = BenefitVerdict::indeterminate;
};
BenefitReport benefit_condition(const SpectralData& sd, const ProblemSpec& spec,
                                const Schedule& s, InitMode mode);

// tau^2 sum_j w_j / (Lambda_j w_j + tau^2), as displayed (plain) and with the
// (V^T Sigma_test V)_jj weights the per-coordinate risk minimum carries
// (weighted). plain == weighted when Sigma_test = I.
struct LowerBound {
  double plain = 0.0;
  double weighted = 0.0;
};
LowerBound risk_lower_bound(const SpectralData& sd, const ProblemSpec& spec, InitMode mode);

// d/dx of the expected excess risk through the per-direction decomposition:
// 2 sum_j phi_j'(x) M_jj (w_j phi_j(x) - tau^2 (1 - phi_j(x)) / Lambda_j).
// Exact in random_init mode; fixed_init requires the diagonal gate.
double risk_derivative(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                       double x, InitMode mode);

// Trains each direction to its own optimal continuous stop (bisection on the
// phi extension) and returns the summed risk; meets the weighted lower bound.
double per_coordinate_optimal_risk(const SpectralData& sd, const ProblemSpec& spec,
                                   const Schedule& s, InitMode mode);

}  // namespace earlystop
