#pragma once

#include <Eigen/Dense>
#include <string>

#include "earlystop/schedule.hpp"
#include "earlystop/spectral.hpp"

namespace earlystop {

// Generalized ridge penalty matching a stopped trajectory:
// D = core^{1/2} V^T with core = diag(Lambda_j phi_j / (n (1 - phi_j))),
// the (I - Phi)^+ convention sending phi_j = 1 entries to core_j = 0.
// A phi_j > 1 makes core_j negative; the object then only records the signed
// core with complex_flag set, and downstream solves refuse it.
struct GeneralizedRidge {
  Eigen::MatrixXd D;    // real sqrt(max(core, 0)) V^T
  Eigen::VectorXd core; // signed diagonal, eigenbasis order
  long long T = 0;
  bool complex_flag = false;
};

GeneralizedRidge ridge_matrix_from_stop(const SpectralData& sd, const Schedule& s, long long T);

// Min-norm solution of (1/2n)||y - X b||^2 + (1/2)||D b||^2 through the
// pseudoinverse identity (X^T X + n V core V^T)^+ X^T y.
Eigen::VectorXd gen_ridge_min_norm(const SpectralData& sd, const GeneralizedRidge& gr);

struct EquivalenceReport {
  long long T = 0;
  double max_rel_err = 0.0;
  bool pass = false;
  std::string note;  // non-empty when a precondition is violated
};

// Checks closed-form beta_T (lambda = 0, beta0 = 0) against the generalized
// ridge solution built from the same stop. Reports, never repairs.
EquivalenceReport verify_equivalence(const SpectralData& sd, const ProblemSpec& spec,
                                     const Schedule& s, long long T, double tol = 1e-8);

// One gradient step from zero with per-direction rates n / (lambda n + Lambda_j);
// equals the ridge min-norm solution (lambda n I + X^T X)^+ X^T y.
Eigen::VectorXd one_step_ridge(const SpectralData& sd, double lambda);

}  // namespace earlystop
