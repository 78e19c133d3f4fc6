#include "earlystop/spectral.hpp"

#include <Eigen/SVD>

#include "earlystop/errors.hpp"

namespace earlystop {

std::vector<double> SpectralData::sample_eigs() const {
  std::vector<double> out(static_cast<size_t>(p));
  for (int j = 0; j < p; ++j) out[static_cast<size_t>(j)] = sample_eig(j);
  return out;
}

SpectralData decompose(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double rank_tol) {
  if (X.rows() == 0 || X.cols() == 0) throw validation_error("decompose: empty design");
  if (y.size() != X.rows()) throw validation_error("decompose: y length must match rows of X");
  if (!(rank_tol > 0.0)) throw validation_error("decompose: rank_tol must be > 0");

  SpectralData sd;
  sd.X = X;
  sd.y = y;
  sd.n = static_cast<int>(X.rows());
  sd.p = static_cast<int>(X.cols());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sd.U = svd.matrixU();
  sd.V = svd.matrixV();
  sd.sv = svd.singularValues();

  sd.Lambda = Eigen::VectorXd::Zero(sd.p);
  for (int j = 0; j < sd.sv.size() && j < sd.p; ++j) sd.Lambda(j) = sd.sv(j) * sd.sv(j);

  double cut = rank_tol * (sd.sv.size() > 0 ? sd.sv(0) : 0.0) * std::max(sd.n, sd.p);
  sd.rank = 0;
  for (int j = 0; j < sd.sv.size(); ++j)
    if (sd.sv(j) > cut) ++sd.rank;
  return sd;
}

void validate_problem_spec(const ProblemSpec& spec, int p) {
  if (spec.beta_star.size() != p) throw validation_error("ProblemSpec: beta_star has wrong length");
  if (spec.beta0.size() != p) throw validation_error("ProblemSpec: beta0 has wrong length");
  if (spec.tau2 < 0.0) throw validation_error("ProblemSpec: tau2 must be >= 0");
  if (spec.sigma2 < 0.0) throw validation_error("ProblemSpec: sigma2 must be >= 0");
  if (spec.lambda < 0.0) throw validation_error("ProblemSpec: lambda must be >= 0");
  if (spec.Sigma_test.rows() != p || spec.Sigma_test.cols() != p)
    throw validation_error("ProblemSpec: Sigma_test must be p x p");

  double scale = std::max(1.0, spec.Sigma_test.norm());
  if ((spec.Sigma_test - spec.Sigma_test.transpose()).norm() > 1e-10 * scale)
    throw validation_error("ProblemSpec: Sigma_test must be symmetric to 1e-10");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.Sigma_test);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw validation_error("ProblemSpec: Sigma_test must be PSD to 1e-10");
}

Eigen::VectorXd to_eigenbasis(const SpectralData& sd, const Eigen::VectorXd& v) {
  if (v.size() != sd.p) throw validation_error("to_eigenbasis: length must be p");
  return sd.V.transpose() * v;
}

Eigen::VectorXd from_eigenbasis(const SpectralData& sd, const Eigen::VectorXd& v) {
  if (v.size() != sd.p) throw validation_error("from_eigenbasis: length must be p");
  return sd.V * v;
}

Eigen::VectorXd residual_rotate(const SpectralData& sd, const Eigen::VectorXd& eps) {
  if (eps.size() != sd.n) throw validation_error("residual_rotate: length must be n");
  return sd.U.transpose() * eps;
}

bool simultaneously_diagonalizable(const SpectralData& sd, const Eigen::MatrixXd& Sigma,
                                   double tol) {
  if (Sigma.rows() != sd.p || Sigma.cols() != sd.p)
    throw validation_error("simultaneously_diagonalizable: Sigma must be p x p");
  Eigen::MatrixXd M = sd.V.transpose() * Sigma * sd.V;
  Eigen::MatrixXd off = M - M.diagonal().asDiagonal().toDenseMatrix();
  return off.norm() <= tol * std::max(1.0, Sigma.norm());
}

}  // namespace earlystop
