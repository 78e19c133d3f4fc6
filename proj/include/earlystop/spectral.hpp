#pragma once

#include <Eigen/Dense>
#include <vector>

namespace earlystop {

// Full SVD of the design, X = U S V^T, with the Gram spectrum zero-padded to
// p entries. Kept whole (not thin) so null-space directions are explicit.
struct SpectralData {
  Eigen::MatrixXd X;       // n x p design
  Eigen::VectorXd y;       // n responses
  Eigen::MatrixXd U;       // n x n
  Eigen::MatrixXd V;       // p x p
  Eigen::VectorXd sv;      // min(n, p) singular values, descending
  Eigen::VectorXd Lambda;  // p eigenvalues of X^T X (sv^2, zero-padded)
  int n = 0;
  int p = 0;
  int rank = 0;

  // lambda_j(Sigma_hat) = Lambda_j / n.
  double sample_eig(int j) const { return Lambda(j) / static_cast<double>(n); }
  std::vector<double> sample_eigs() const;
  double lambda_max() const { return Lambda(0) / static_cast<double>(n); }
  Eigen::MatrixXd sigma_hat() const { return X.transpose() * X / static_cast<double>(n); }
};

// Problem description around a fixed design: truth, start, noise and prior
// variances, explicit ridge strength, and the test covariance for the risk.
struct ProblemSpec {
  Eigen::VectorXd beta_star;
  Eigen::VectorXd beta0;
  double tau2 = 0.0;    // noise variance
  double sigma2 = 0.0;  // spread of beta0 - beta_star in the random-init model
  double lambda = 0.0;
  Eigen::MatrixXd Sigma_test;
};

// rank = #{ sv_j > rank_tol * max_sv * max(n, p) }.
SpectralData decompose(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       double rank_tol = 1e-12);

// Dimension checks plus Sigma_test symmetric PSD to 1e-10 (relative).
void validate_problem_spec(const ProblemSpec& spec, int p);

Eigen::VectorXd to_eigenbasis(const SpectralData& sd, const Eigen::VectorXd& v);
Eigen::VectorXd from_eigenbasis(const SpectralData& sd, const Eigen::VectorXd& v);
Eigen::VectorXd residual_rotate(const SpectralData& sd, const Eigen::VectorXd& eps);

// ||V^T Sigma V - diag(V^T Sigma V)||_F <= tol * max(1, ||Sigma||_F).
bool simultaneously_diagonalizable(const SpectralData& sd, const Eigen::MatrixXd& Sigma,
                                   double tol = 1e-8);

}  // namespace earlystop
