#include "earlystop/equivalence.hpp"

#include <cmath>

#include "earlystop/errors.hpp"
#include "earlystop/phi.hpp"
#include "earlystop/trajectory.hpp"

namespace earlystop {

GeneralizedRidge ridge_matrix_from_stop(const SpectralData& sd, const Schedule& s, long long T) {
  if (T < 1) throw validation_error("ridge_matrix_from_stop: T must be >= 1");
  GeneralizedRidge gr;
  gr.T = T;
  gr.core = Eigen::VectorXd::Zero(sd.p);
  for (int j = 0; j < sd.rank; ++j) {
    double phi = phi_product(s, sd.sample_eig(j), T).value();
    if (phi == 1.0) continue;  // (I - Phi)^+ sends an unmoved direction to 0
    double c = sd.Lambda(j) * phi / (static_cast<double>(sd.n) * (1.0 - phi));
    gr.core(j) = c;
    if (c < 0.0) gr.complex_flag = true;
  }
  Eigen::VectorXd root = gr.core.cwiseMax(0.0).cwiseSqrt();
  gr.D = root.asDiagonal() * sd.V.transpose();
  return gr;
}

Eigen::VectorXd gen_ridge_min_norm(const SpectralData& sd, const GeneralizedRidge& gr) {
  if (gr.core.size() != sd.p) throw validation_error("gen_ridge_min_norm: core has wrong length");
  if (gr.complex_flag)
    throw validation_error("gen_ridge_min_norm: refusing a complex-valued penalty (some phi > 1)");
  Eigen::VectorXd xty_tilde = sd.V.transpose() * (sd.X.transpose() * sd.y);
  Eigen::VectorXd sol_tilde = Eigen::VectorXd::Zero(sd.p);
  for (int j = 0; j < sd.p; ++j) {
    double d = (j < sd.rank ? sd.Lambda(j) : 0.0) + static_cast<double>(sd.n) * gr.core(j);
    if (d > 0.0) sol_tilde(j) = xty_tilde(j) / d;
  }
  return from_eigenbasis(sd, sol_tilde);
}

EquivalenceReport verify_equivalence(const SpectralData& sd, const ProblemSpec& spec,
                                     const Schedule& s, long long T, double tol) {
  EquivalenceReport rep;
  rep.T = T;
  if (T < 1) {
    rep.note = "T must be >= 1";
    return rep;
  }
  if (spec.lambda != 0.0) {
    rep.note = "equivalence holds for lambda = 0 trajectories only";
    return rep;
  }
  if (spec.beta0.size() != sd.p || spec.beta0.norm() != 0.0) {
    rep.note = "equivalence holds for beta0 = 0 only";
    return rep;
  }
  GeneralizedRidge gr = ridge_matrix_from_stop(sd, s, T);
  if (gr.complex_flag) {
    rep.note = "some phi_j(T) > 1: penalty is complex, equivalence not representable";
    return rep;
  }
  Eigen::VectorXd beta_t = closed_form_beta(sd, spec, s, T).beta;
  Eigen::VectorXd beta_d = gen_ridge_min_norm(sd, gr);
  rep.max_rel_err = (beta_t - beta_d).norm() / (1.0 + beta_t.norm());
  rep.pass = rep.max_rel_err <= tol;
  return rep;
}

Eigen::VectorXd one_step_ridge(const SpectralData& sd, double lambda) {
  if (lambda < 0.0) throw validation_error("one_step_ridge: lambda must be >= 0");
  double n = static_cast<double>(sd.n);
  // Step from beta = 0: gradient of the ridge objective is -(1/n) X^T y, so
  // coordinate j of V^T beta_1 is eta_j * (V^T X^T y)_j / n with
  // eta_j = n / (lambda n + Lambda_j), pseudoinverted where the shift is 0.
  Eigen::VectorXd xty_tilde = sd.V.transpose() * (sd.X.transpose() * sd.y);
  Eigen::VectorXd beta1_tilde = Eigen::VectorXd::Zero(sd.p);
  for (int j = 0; j < sd.p; ++j) {
    double d = lambda * n + (j < sd.rank ? sd.Lambda(j) : 0.0);
    if (d > 0.0) beta1_tilde(j) = (n / d) * (xty_tilde(j) / n);
  }
  return from_eigenbasis(sd, beta1_tilde);
}

}  // namespace earlystop
