#pragma once

#include <Eigen/Dense>
#include <vector>

#include "earlystop/schedule.hpp"
#include "earlystop/spectral.hpp"

namespace earlystop {

struct TrajectoryPoint {
  long long k = 0;
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_tilde_err;  // V^T (beta - beta_star)
};

// One update: beta - (eta/n) X^T (X beta - y) - eta lambda beta.
Eigen::VectorXd gd_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                        const Eigen::VectorXd& beta, double eta);
Eigen::VectorXd gd_step(const SpectralData& sd, const ProblemSpec& spec,
                        const Eigen::VectorXd& beta, double eta);

// Iterates k = 0..T inclusive.
std::vector<TrajectoryPoint> gd_run(const SpectralData& sd, const ProblemSpec& spec,
                                    const Schedule& s, long long T);
// Streaming variant, final iterate only.
Eigen::VectorXd gd_final(const SpectralData& sd, const ProblemSpec& spec, const Schedule& s,
                         long long T);

// Exact iterate without iterating, computed through two algebraically equal
// routes (spectral-projector form and eigenbasis error form); they must agree
// to 1e-10 relative or a numerical_error is thrown.
TrajectoryPoint closed_form_beta(const SpectralData& sd, const ProblemSpec& spec,
                                 const Schedule& s, long long k);

// (lambda n I + X^T X)^+ X^T y, the benign-schedule limit point.
Eigen::VectorXd convergence_limit(const SpectralData& sd, const ProblemSpec& spec);

}  // namespace earlystop
