#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "earlystop/errors.hpp"
#include "earlystop/phi.hpp"
#include "earlystop/schedule.hpp"
#include "earlystop/spectral.hpp"
#include "earlystop/trajectory.hpp"
#include "test_support.hpp"

using earlystop::closed_form_beta;
using earlystop::convergence_limit;
using earlystop::decompose;
using earlystop::gd_final;
using earlystop::gd_run;
using earlystop::gd_step;
using earlystop::phi_product;
using earlystop::ProblemSpec;
using earlystop::Schedule;
using earlystop::SpectralData;
using earlystop::SubRng;
using earlystop::validation_error;

TEST_CASE("single scalar step moves by eta times the gradient") {
  Eigen::MatrixXd X(1, 1);
  X << 1.0;
  Eigen::VectorXd y(1), beta(1);
  y << 1.0;
  beta << 0.0;
  Eigen::VectorXd next = gd_step(X, y, 0.0, beta, 0.5);
  CHECK(next(0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("three scalar ridge steps follow the recursion by hand") {
  Eigen::MatrixXd X(1, 1);
  X << 2.0;
  Eigen::VectorXd y(1);
  y << 3.0;
  SpectralData sd = decompose(X, y);
  ProblemSpec spec;
  spec.beta_star = Eigen::VectorXd::Zero(1);
  spec.beta0 = Eigen::VectorXd::Constant(1, 0.4);
  spec.lambda = 0.1;
  spec.Sigma_test = Eigen::MatrixXd::Identity(1, 1);
  Schedule s = Schedule::explicit_rates({0.2, 0.1, 0.05});

  double b = 0.4;
  for (double eta : {0.2, 0.1, 0.05}) b = b - eta * (2.0 * (2.0 * b - 3.0) + 0.1 * b);
  auto run = gd_run(sd, spec, s, 3);
  REQUIRE(run.size() == 4);
  CHECK(run[3].beta(0) == doctest::Approx(b).epsilon(1e-14));
  CHECK(gd_final(sd, spec, s, 3)(0) == doctest::Approx(b).epsilon(1e-14));
  CHECK(closed_form_beta(sd, spec, s, 3).beta(0) == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("the ridge solution is a fixed point of the update") {
  SubRng rng(5150u, 4u);
  auto inst = testsupport::random_instance(rng, 10, 6, 0.3);
  Eigen::VectorXd limit = convergence_limit(inst.sd, inst.spec);
  Eigen::VectorXd stepped = gd_step(inst.sd, inst.spec, limit, 0.07);
  CHECK((stepped - limit).norm() <= 1e-12 * std::max(1.0, limit.norm()));
}

TEST_CASE("zero steps return the start everywhere") {
  SubRng rng(11u, 8u);
  auto inst = testsupport::random_instance(rng, 7, 4, 0.0, 0.5, false);
  Schedule s = Schedule::constant(0.1);
  auto run = gd_run(inst.sd, inst.spec, s, 0);
  REQUIRE(run.size() == 1);
  CHECK(run[0].k == 0);
  CHECK((run[0].beta - inst.spec.beta0).norm() == 0.0);
  CHECK((gd_final(inst.sd, inst.spec, s, 0) - inst.spec.beta0).norm() == 0.0);
  auto cf = closed_form_beta(inst.sd, inst.spec, s, 0);
  CHECK((cf.beta - inst.spec.beta0).norm() <= 1e-12 * std::max(1.0, inst.spec.beta0.norm()));
  CHECK_THROWS_AS(gd_run(inst.sd, inst.spec, s, -1), validation_error);
  CHECK_THROWS_AS(closed_form_beta(inst.sd, inst.spec, s, -2), validation_error);
}

TEST_CASE("closed form matches the iterative run on 300 random instances") {
  SubRng rng(90210u, 6u);
  const double lambdas[] = {0.0, 0.05, 0.5};
  int instances = 0;
  for (int t = 0; t < 300; ++t) {
    int n = 2 + static_cast<int>(13.0 * rng.uniform01());
    int p = 2 + static_cast<int>(13.0 * rng.uniform01());
    double lambda = lambdas[t % 3];
    auto inst = testsupport::random_instance(rng, n, p, lambda, 0.5, t % 2 == 0);
    double scale = 0.95 / (inst.sd.lambda_max() + lambda);
    Schedule s = testsupport::random_schedule(rng, t % 6, scale, 100);
    long long k = (t % 4 == 0) ? 1 : (t % 4 == 1) ? 3 : (t % 4 == 2) ? 17 : 100;
    Eigen::VectorXd iter = gd_final(inst.sd, inst.spec, s, k);
    auto cf = closed_form_beta(inst.sd, inst.spec, s, k);
    double denom = std::max(1.0, iter.norm());
    CHECK((cf.beta - iter).norm() <= 1e-8 * denom);
    Eigen::VectorXd err = inst.sd.V.transpose() * (iter - inst.spec.beta_star);
    CHECK((cf.beta_tilde_err - err).norm() <= 1e-8 * std::max(1.0, err.norm()));
    ++instances;
  }
  CHECK(instances == 300);
}

TEST_CASE("iterates are convex combinations of start and limit in the eigenbasis") {
  SubRng rng(345u, 7u);
  auto inst = testsupport::random_instance(rng, 12, 7, 0.05, 0.5, false);
  Schedule s = Schedule::polynomial(0.9 / (inst.sd.lambda_max() + 0.05), 0.5);
  Eigen::VectorXd binf = inst.sd.V.transpose() * convergence_limit(inst.sd, inst.spec);
  Eigen::VectorXd b0 = inst.sd.V.transpose() * inst.spec.beta0;
  for (long long k : {1LL, 4LL, 25LL}) {
    Eigen::VectorXd bk = inst.sd.V.transpose() * gd_final(inst.sd, inst.spec, s, k);
    for (int j = 0; j < inst.sd.p; ++j) {
      double zeta =
          inst.spec.lambda + (j < inst.sd.rank ? inst.sd.sample_eig(j) : 0.0);
      double phi = phi_product(s, zeta, k).value();
      CHECK(bk(j) ==
            doctest::Approx(phi * b0(j) + (1.0 - phi) * binf(j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("eigenbasis coordinates decouple into scalar recursions") {
  SubRng rng(999u, 3u);
  auto inst = testsupport::random_instance(rng, 9, 5, 0.2, 0.5, false);
  Schedule s = Schedule::additive_decay(0.4 / (inst.sd.lambda_max() + 0.2), 0.004);
  Eigen::VectorXd binf = inst.sd.V.transpose() * convergence_limit(inst.sd, inst.spec);
  auto run = gd_run(inst.sd, inst.spec, s, 20);
  Eigen::VectorXd prev = inst.sd.V.transpose() * run[0].beta - binf;
  for (long long k = 1; k <= 20; ++k) {
    Eigen::VectorXd cur = inst.sd.V.transpose() * run[static_cast<size_t>(k)].beta - binf;
    double eta = s.eta_at(k);
    for (int j = 0; j < inst.sd.p; ++j) {
      double zeta =
          inst.spec.lambda + (j < inst.sd.rank ? inst.sd.sample_eig(j) : 0.0);
      CHECK(std::abs(cur(j) - (1.0 - eta * zeta) * prev(j)) <=
            1e-12 * std::max(1.0, std::abs(prev(j))));
    }
    prev = cur;
  }
}

TEST_CASE("rate sums telescope against phi") {
  // sum_{i=1..k} eta_i / phi(i; x) = (1/x) (1/phi(k; x) - 1).
  SubRng rng(246u, 1u);
  for (int t = 0; t < 100; ++t) {
    double x = 0.2 + 1.3 * rng.uniform01();
    double scale = 0.9 / x;
    Schedule s = testsupport::random_schedule(rng, t % 6, scale, 40);
    long long k = 1 + static_cast<long long>(30.0 * rng.uniform01());
    double lhs = 0.0;
    for (long long i = 1; i <= k; ++i)
      lhs += s.eta_at(i) / phi_product(s, x, i).value();
    double rhs = (1.0 / phi_product(s, x, k).value() - 1.0) / x;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("convergence limit solves the ridge normal equations") {
  SubRng rng(888u, 2u);
  Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 0.5;
  ProblemSpec spec;
  spec.beta_star = Eigen::VectorXd::Zero(3);
  spec.beta0 = Eigen::VectorXd::Zero(3);
  spec.Sigma_test = I3;
  SpectralData sd = decompose(I3, y);
  CHECK((convergence_limit(sd, spec) - y).norm() <= 1e-12);

  spec.lambda = 1e9;
  CHECK(convergence_limit(sd, spec).norm() <= 1e-8);
  spec.lambda = 0.0;

  // Underdetermined: the limit is the minimum-norm least-squares solution.
  Eigen::MatrixXd X = testsupport::random_matrix(rng, 4, 7);
  Eigen::VectorXd y2 = testsupport::random_vector(rng, 4);
  SpectralData under = decompose(X, y2);
  ProblemSpec spec2;
  spec2.beta_star = Eigen::VectorXd::Zero(7);
  spec2.beta0 = Eigen::VectorXd::Zero(7);
  spec2.Sigma_test = Eigen::MatrixXd::Identity(7, 7);
  Eigen::VectorXd minnorm = X.completeOrthogonalDecomposition().solve(y2);
  CHECK((convergence_limit(under, spec2) - minnorm).norm() <= 1e-10 * minnorm.norm());

  // A long benign run approaches the limit.
  SubRng rng2(889u, 2u);
  auto inst = testsupport::random_instance(rng2, 10, 5, 0.05);
  Schedule s = Schedule::constant(0.5 / (inst.sd.lambda_max() + 0.05));
  Eigen::VectorXd limit = convergence_limit(inst.sd, inst.spec);
  CHECK((gd_final(inst.sd, inst.spec, s, 5000) - limit).norm() <=
        1e-6 * std::max(1.0, limit.norm()));
}
