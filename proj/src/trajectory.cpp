#include "earlystop/trajectory.hpp"

#include <cmath>

#include "earlystop/errors.hpp"
#include "earlystop/phi.hpp"

namespace earlystop {

namespace {

// Entrywise pseudoinverse of the diagonal lambda*n + Lambda, with the spectral
// rank deciding which Lambda entries count as zero.
Eigen::VectorXd shifted_gram_pinv(const SpectralData& sd, double lambda) {
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sd.p);
  double ln = lambda * static_cast<double>(sd.n);
  for (int j = 0; j < sd.p; ++j) {
    double d = ln + (j < sd.rank ? sd.Lambda(j) : 0.0);
    if (d > 0.0) inv(j) = 1.0 / d;
  }
  return inv;
}

Eigen::VectorXd phi_values(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                           long long k) {
  Eigen::VectorXd phi(sd.p);
  for (int j = 0; j < sd.p; ++j) {
    double zeta = spec.lambda + (j < sd.rank ? sd.sample_eig(j) : 0.0);
    phi(j) = phi_product(s, zeta, k).value();
  }
  return phi;
}

}  // namespace

Eigen::VectorXd gd_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                        const Eigen::VectorXd& beta, double eta) {
  double n = static_cast<double>(X.rows());
  return beta - (eta / n) * (X.transpose() * (X * beta - y)) - eta * lambda * beta;
}

Eigen::VectorXd gd_step(const SpectralData& sd, const ProblemSpec& spec,
                        const Eigen::VectorXd& beta, double eta) {
  if (beta.size() != sd.p) throw validation_error("gd_step: beta has wrong length");
  return gd_step(sd.X, sd.y, spec.lambda, beta, eta);
}

std::vector<TrajectoryPoint> gd_run(const SpectralData& sd, const ProblemSpec& spec,
                                    const Schedule& s, long long T) {
  if (T < 0) throw validation_error("gd_run: T must be >= 0");
  if (spec.beta0.size() != sd.p) throw validation_error("gd_run: beta0 has wrong length");
  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<size_t>(T) + 1);
  Eigen::VectorXd beta = spec.beta0;
  for (long long k = 0; k <= T; ++k) {
    if (k > 0) beta = gd_step(sd, spec, beta, s.eta_at(k));
    out.push_back({k, beta, to_eigenbasis(sd, beta - spec.beta_star)});
  }
  return out;
}

Eigen::VectorXd gd_final(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                         long long T) {
  if (T < 0) throw validation_error("gd_final: T must be >= 0");
  Eigen::VectorXd beta = spec.beta0;
  for (long long k = 1; k <= T; ++k) beta = gd_step(sd, spec, beta, s.eta_at(k));
  return beta;
}

TrajectoryPoint closed_form_beta(const SpectralData& sd, const ProblemSpec& spec,
                                 const Schedule& s, long long k) {
  if (k < 0) throw validation_error("closed_form_beta: k must be >= 0");
  if (spec.beta0.size() != sd.p || spec.beta_star.size() != sd.p)
    throw validation_error("closed_form_beta: beta0/beta_star have wrong length");

  Eigen::VectorXd phi = phi_values(sd, spec, s, k);
  Eigen::VectorXd pinv = shifted_gram_pinv(sd, spec.lambda);
  double ln = spec.lambda * static_cast<double>(sd.n);

  // Route A: V Phi V^T beta0 + (I - V Phi V^T) (lambda n I + X^T X)^+ X^T y.
  Eigen::VectorXd xty_tilde = sd.V.transpose() * (sd.X.transpose() * sd.y);
  Eigen::VectorXd limit_tilde = pinv.cwiseProduct(xty_tilde);
  Eigen::VectorXd beta0_tilde = to_eigenbasis(sd, spec.beta0);
  Eigen::VectorXd a_tilde =
      phi.cwiseProduct(beta0_tilde) + (Eigen::VectorXd::Ones(sd.p) - phi).cwiseProduct(limit_tilde);
  Eigen::VectorXd beta_a = from_eigenbasis(sd, a_tilde);

  // Route B: error form around beta_star with the rotated residual.
  Eigen::VectorXd beta_star_tilde = to_eigenbasis(sd, spec.beta_star);
  Eigen::VectorXd eps_check = residual_rotate(sd, sd.y - sd.X * spec.beta_star);
  Eigen::VectorXd sigma_eps = Eigen::VectorXd::Zero(sd.p);
  for (int j = 0; j < sd.sv.size() && j < sd.p; ++j) sigma_eps(j) = sd.sv(j) * eps_check(j);
  Eigen::VectorXd err_tilde =
      phi.cwiseProduct(beta0_tilde - beta_star_tilde) +
      pinv.cwiseProduct((Eigen::VectorXd::Ones(sd.p) - phi)
                            .cwiseProduct(sigma_eps - ln * beta_star_tilde));
  Eigen::VectorXd beta_b = spec.beta_star + from_eigenbasis(sd, err_tilde);

  double rel = (beta_a - beta_b).norm() / (1.0 + beta_b.norm());
  if (!(rel <= 1e-10))
    throw numerical_error("closed_form_beta: projector and error routes disagree");

  return {k, beta_b, err_tilde};
}

Eigen::VectorXd convergence_limit(const SpectralData& sd, const ProblemSpec& spec) {
  Eigen::VectorXd pinv = shifted_gram_pinv(sd, spec.lambda);
  Eigen::VectorXd xty_tilde = sd.V.transpose() * (sd.X.transpose() * sd.y);
  return from_eigenbasis(sd, pinv.cwiseProduct(xty_tilde));
}

}  // namespace earlystop
