#include "earlystop/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "earlystop/errors.hpp"
#include "earlystop/phi.hpp"
#include "earlystop/rng.hpp"
#include "earlystop/trajectory.hpp"

namespace earlystop {

namespace {

Eigen::MatrixXd rotated_sigma(const SpectralData& sd, const ProblemSpec& spec) {
  if (spec.Sigma_test.rows() != sd.p || spec.Sigma_test.cols() != sd.p)
    throw validation_error("risk: Sigma_test must be p x p");
  return sd.V.transpose() * spec.Sigma_test * sd.V;
}

// Per-direction squared init error: (beta0 - beta_star)_j^2 in the eigenbasis
// for fixed_init, sigma2 for every j in random_init.
Eigen::VectorXd init_weights(const SpectralData& sd, const ProblemSpec& spec, InitMode mode) {
  if (mode == InitMode::random_init)
    return Eigen::VectorXd::Constant(sd.p, spec.sigma2);
  Eigen::VectorXd b = to_eigenbasis(sd, spec.beta0 - spec.beta_star);
  return b.cwiseProduct(b);
}

void require_lambda_zero(const ProblemSpec& spec, const char* who) {
  if (spec.lambda != 0.0)
    throw validation_error(std::string(who) + ": analytic risk is stated for lambda = 0");
}

void require_diagonal_gate(const SpectralData& sd, const ProblemSpec& spec, const char* who) {
  if (!simultaneously_diagonalizable(sd, spec.Sigma_test))
    throw validation_error(std::string(who) +
                           ": fixed_init needs V^T Sigma_test V diagonal (within 1e-8)");
}

void require_step_size(const SpectralData& sd, const Schedule& s, const char* who) {
  double sup = s.eta_sup();
  double cap = 1.0 / sd.lambda_max();
  if (!(sup <= cap * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << who << ": step-size hypothesis violated, sup eta = " << sup
       << " exceeds 1/lambda_max(Sigma_hat) = " << cap;
    throw validation_error(os.str());
  }
}

}  // namespace

double excess_risk_of(const ProblemSpec& spec, const Eigen::VectorXd& beta) {
  if (beta.size() != spec.beta_star.size())
    throw validation_error("excess_risk_of: beta has wrong length");
  Eigen::VectorXd d = beta - spec.beta_star;
  return d.dot(spec.Sigma_test * d);
}

RiskScan risk_scan(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                   long long k_max, InitMode mode) {
  if (k_max < 0) throw validation_error("risk_scan: k_max must be >= 0");
  require_lambda_zero(spec, "risk_scan");

  Eigen::MatrixXd M = rotated_sigma(sd, spec);
  Eigen::VectorXd diagM = M.diagonal();
  Eigen::VectorXd w = init_weights(sd, spec, mode);

  // Log-space accumulation identical to phi_product, so scan values match
  // individually computed phi values bit for bit.
  Eigen::VectorXd logphi = Eigen::VectorXd::Zero(sd.p);
  Eigen::VectorXi sign = Eigen::VectorXi::Ones(sd.p);
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(sd.p);
  Eigen::VectorXd binit;
  if (mode == InitMode::fixed_init) binit = to_eigenbasis(sd, spec.beta0 - spec.beta_star);

  RiskScan out;
  out.risk.reserve(static_cast<size_t>(k_max) + 1);
  out.bias.reserve(static_cast<size_t>(k_max) + 1);
  out.variance.reserve(static_cast<size_t>(k_max) + 1);

  for (long long k = 0; k <= k_max; ++k) {
    if (k > 0) {
      double eta = s.eta_at(k);
      for (int j = 0; j < sd.p; ++j) {
        double zeta = j < sd.rank ? sd.sample_eig(j) : 0.0;
        double f = 1.0 - eta * zeta;
        if (f == 0.0 || sign(j) == 0) {
          sign(j) = 0;
          phi(j) = 0.0;
        } else {
          logphi(j) += std::log(std::abs(f));
          if (f < 0.0) sign(j) = -sign(j);
          phi(j) = sign(j) * std::exp(logphi(j));
        }
      }
    }
    double bias;
    if (mode == InitMode::random_init) {
      bias = 0.0;
      for (int j = 0; j < sd.p; ++j) bias += w(j) * diagM(j) * phi(j) * phi(j);
    } else {
      Eigen::VectorXd v = phi.cwiseProduct(binit);
      bias = v.dot(M * v);
    }
    double variance = 0.0;
    for (int j = 0; j < sd.rank; ++j) {
      double one_minus = 1.0 - phi(j);
      variance += spec.tau2 * diagM(j) * one_minus * one_minus / sd.Lambda(j);
    }
    out.bias.push_back(bias);
    out.variance.push_back(variance);
    out.risk.push_back(bias + variance);
  }
  return out;
}

RiskCurve risk_curve_analytic(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                              const std::vector<long long>& ks, InitMode mode) {
  if (ks.empty()) throw validation_error("risk_curve_analytic: ks must be non-empty");
  if (!std::is_sorted(ks.begin(), ks.end()))
    throw validation_error("risk_curve_analytic: ks must be sorted ascending");
  RiskScan scan = risk_scan(sd, spec, s, ks.back(), mode);
  RiskCurve curve;
  curve.ks = ks;
  for (long long k : ks) {
    curve.risk.push_back(scan.risk[static_cast<size_t>(k)]);
    curve.bias.push_back(scan.bias[static_cast<size_t>(k)]);
    curve.variance.push_back(scan.variance[static_cast<size_t>(k)]);
  }
  std::ostringstream os;
  os << "schedule=" << s.describe() << " mode="
     << (mode == InitMode::random_init ? "random_init" : "fixed_init")
     << " tau2=" << spec.tau2 << " sigma2=" << spec.sigma2;
  curve.meta = os.str();
  return curve;
}

std::vector<double> risk_curve_empirical(const SpectralData& sd, const ProblemSpec& spec,
                                         const Schedule& s, const std::vector<long long>& ks) {
  std::vector<double> out;
  out.reserve(ks.size());
  for (long long k : ks) out.push_back(excess_risk_of(spec, closed_form_beta(sd, spec, s, k).beta));
  return out;
}

std::vector<McRisk> mc_risk_curve(const SpectralData& sd, const ProblemSpec& spec,
                                  const Schedule& s, const std::vector<long long>& ks, int trials,
                                  std::uint64_t seed, InitMode mode, NoiseKind noise) {
  if (ks.empty()) throw validation_error("mc_risk_curve: ks must be non-empty");
  if (!std::is_sorted(ks.begin(), ks.end()) || ks.front() < 0)
    throw validation_error("mc_risk_curve: ks must be sorted ascending and >= 0");
  if (trials < 2) throw validation_error("mc_risk_curve: trials must be >= 2");

  double tau = std::sqrt(spec.tau2);
  double sig = std::sqrt(spec.sigma2);
  std::vector<double> sum(ks.size(), 0.0), sumsq(ks.size(), 0.0);

  for (int t = 0; t < trials; ++t) {
    SubRng rng(seed, kStreamTrialBase + static_cast<std::uint64_t>(t));
    Eigen::VectorXd beta_star = spec.beta_star;
    if (mode == InitMode::random_init) {
      // beta_star = beta0 - delta, delta ~ N(0, sigma2 I): same law as
      // redrawing the start around a fixed truth.
      beta_star = spec.beta0;
      for (int j = 0; j < sd.p; ++j) beta_star(j) -= rng.gaussian(sig);
    }
    Eigen::VectorXd eps(sd.n);
    for (int i = 0; i < sd.n; ++i)
      eps(i) = noise == NoiseKind::gaussian ? rng.gaussian(tau) : tau * rng.rademacher();
    Eigen::VectorXd y = sd.X * beta_star + eps;

    Eigen::VectorXd beta = spec.beta0;
    size_t next = 0;
    for (long long k = 0; k <= ks.back(); ++k) {
      if (k > 0) beta = gd_step(sd.X, y, spec.lambda, beta, s.eta_at(k));
      while (next < ks.size() && ks[next] == k) {
        Eigen::VectorXd d = beta - beta_star;
        double r = d.dot(spec.Sigma_test * d);
        sum[next] += r;
        sumsq[next] += r * r;
        ++next;
      }
    }
  }

  std::vector<McRisk> out(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) {
    double mean = sum[i] / trials;
    double var = std::max(0.0, (sumsq[i] - trials * mean * mean) / (trials - 1));
    out[i] = {mean, std::sqrt(var / trials)};
  }
  return out;
}

McRisk mc_risk(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s, long long k,
               int trials, std::uint64_t seed, InitMode mode, NoiseKind noise) {
  return mc_risk_curve(sd, spec, s, {k}, trials, seed, mode, noise)[0];
}

BenefitReport benefit_condition(const SpectralData& sd, const ProblemSpec& spec,
                                const Schedule& s, InitMode mode) {
  require_lambda_zero(spec, "benefit_condition");
  require_step_size(sd, s, "benefit_condition");
  if (mode == InitMode::fixed_init) require_diagonal_gate(sd, spec, "benefit_condition");

  Eigen::VectorXd w = init_weights(sd, spec, mode);
  BenefitReport rep;
  bool all_sat = true, all_unsat = true;
  for (int j = 0; j < sd.rank; ++j) {
    double limit = phi_limit(s, sd.sample_eig(j));
    double threshold = spec.tau2 / (sd.Lambda(j) * w(j) + spec.tau2);
    bool sat = limit < threshold;
    rep.coords.push_back({j, limit, threshold, sat});
    all_sat = all_sat && sat;
    all_unsat = all_unsat && !sat;
  }
  rep.verdict = all_sat      ? BenefitVerdict::beneficial
                : all_unsat  ? BenefitVerdict::not_beneficial
                             : BenefitVerdict::indeterminate;
  return rep;
}

LowerBound risk_lower_bound(const SpectralData& sd, const ProblemSpec& spec, InitMode mode) {
  if (mode == InitMode::fixed_init) require_diagonal_gate(sd, spec, "risk_lower_bound");
  LowerBound lb;
  if (spec.tau2 == 0.0) return lb;
  Eigen::VectorXd w = init_weights(sd, spec, mode);
  Eigen::VectorXd diagM = rotated_sigma(sd, spec).diagonal();
  for (int j = 0; j < sd.p; ++j) {
    double lam = j < sd.rank ? sd.Lambda(j) : 0.0;
    double term = spec.tau2 * w(j) / (lam * w(j) + spec.tau2);
    lb.plain += term;
    lb.weighted += diagM(j) * term;
  }
  return lb;
}

double risk_derivative(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                       double x, InitMode mode) {
  require_lambda_zero(spec, "risk_derivative");
  if (mode == InitMode::fixed_init) require_diagonal_gate(sd, spec, "risk_derivative");
  Eigen::VectorXd w = init_weights(sd, spec, mode);
  Eigen::VectorXd diagM = rotated_sigma(sd, spec).diagonal();
  double total = 0.0;
  for (int j = 0; j < sd.rank; ++j) {
    double zeta = sd.sample_eig(j);
    double phi = phi_extended(s, zeta, x).value();
    double dphi = phi_derivative(s, zeta, x);
    total += 2.0 * dphi * diagM(j) * (w(j) * phi - spec.tau2 * (1.0 - phi) / sd.Lambda(j));
  }
  return total;
}

double per_coordinate_optimal_risk(const SpectralData& sd, const ProblemSpec& spec,
                                   const Schedule& s, InitMode mode) {
  if (spec.tau2 <= 0.0)
    throw validation_error("per_coordinate_optimal_risk: tau2 must be > 0");
  if (mode == InitMode::fixed_init) require_diagonal_gate(sd, spec, "per_coordinate_optimal_risk");
  Eigen::VectorXd w = init_weights(sd, spec, mode);
  Eigen::VectorXd diagM = rotated_sigma(sd, spec).diagonal();

  double total = 0.0;
  for (int j = 0; j < sd.p; ++j) {
    if (j >= sd.rank) {
      total += diagM(j) * w(j);  // phi stays 1, bias persists
      continue;
    }
    double zeta = sd.sample_eig(j);
    double target = spec.tau2 / (sd.Lambda(j) * w(j) + spec.tau2);
    auto phi_at = [&](double x) { return phi_extended(s, zeta, x).value(); };
    double achieved;
    double hi = 1.0;
    while (phi_at(hi) > target && hi < 1e12) hi *= 2.0;
    if (phi_at(hi) > target) {
      achieved = phi_at(hi);  // target below the schedule's floor
    } else {
      double lo = 0.0;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (phi_at(mid) > target ? lo : hi) = mid;
      }
      achieved = phi_at(0.5 * (lo + hi));
    }
    double one_minus = 1.0 - achieved;
    total += diagM(j) *
             (w(j) * achieved * achieved + spec.tau2 * one_minus * one_minus / sd.Lambda(j));
  }
  return total;
}

}  // namespace earlystop
