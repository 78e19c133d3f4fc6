#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "earlystop/errors.hpp"
#include "earlystop/stopping.hpp"
#include "test_support.hpp"

using earlystop::aggregate_stop;
using earlystop::decompose;
using earlystop::make_stopping_report;
using earlystop::per_direction_stop;
using earlystop::ProblemSpec;
using earlystop::raskutti_stop;
using earlystop::RateDenominator;
using earlystop::Schedule;
using earlystop::SpectralData;
using earlystop::SubRng;
using earlystop::true_optimal_stop;
using earlystop::validation_error;

namespace {

struct Diag {
  SpectralData sd;
  ProblemSpec spec;
};

Diag diag_instance(const Eigen::VectorXd& diag, double sigma2, double tau2) {
  Diag d;
  Eigen::MatrixXd X = diag.asDiagonal();
  d.sd = decompose(X, Eigen::VectorXd::Ones(diag.size()));
  d.spec.beta_star = Eigen::VectorXd::Zero(diag.size());
  d.spec.beta0 = Eigen::VectorXd::Zero(diag.size());
  d.spec.sigma2 = sigma2;
  d.spec.tau2 = tau2;
  d.spec.Sigma_test = Eigen::MatrixXd::Identity(diag.size(), diag.size());
  return d;
}

}  // namespace

TEST_CASE("constant schedules stop at the budget over the rate, exactly") {
  auto d = diag_instance(Eigen::Vector2d(2.0, 1.0), 1.0, 0.5);
  // Lambda = (4, 1), sample eigenvalues (2, 0.5).
  Schedule s = Schedule::constant(0.3);
  auto s0 = per_direction_stop(d.sd, d.spec, s, 0);
  CHECK(s0.target_phi == doctest::Approx(0.5 / 4.5).epsilon(1e-14));
  CHECK(s0.k_real == doctest::Approx(std::log1p(8.0) / (2.0 * 0.3)).epsilon(1e-12));
  CHECK_FALSE(s0.never);
  auto s1 = per_direction_stop(d.sd, d.spec, s, 1);
  CHECK(s1.k_real == doctest::Approx(std::log1p(2.0) / (0.5 * 0.3)).epsilon(1e-12));

  auto g0 = per_direction_stop(d.sd, d.spec, s, 0, RateDenominator::gram_eigenvalue);
  CHECK(g0.k_real == doctest::Approx(std::log1p(8.0) / (4.0 * 0.3)).epsilon(1e-12));
  CHECK(g0.k_real < s0.k_real);  // Lambda_j >= Lambda_j / n for n > 1

  CHECK_THROWS_AS(per_direction_stop(d.sd, d.spec, s, 2), validation_error);
  ProblemSpec flat = d.spec;
  flat.sigma2 = 0.0;
  CHECK_THROWS_AS(per_direction_stop(d.sd, flat, s, 0), validation_error);
}

TEST_CASE("overwhelming noise stops immediately") {
  auto d = diag_instance(Eigen::Vector2d(2.0, 1.0), 1.0, 1e12);
  auto stop = per_direction_stop(d.sd, d.spec, Schedule::constant(0.3), 0);
  CHECK_FALSE(stop.never);
  CHECK(stop.k_real < 1e-9);
  CHECK(stop.target_phi > 1.0 - 1e-9);
}

TEST_CASE("fractional stops interpolate within a step") {
  auto d = diag_instance(Eigen::VectorXd::Ones(1), std::exp(0.5) - 1.0, 1.0);
  // Budget log1p(sigma2) = 0.5; rates 0.4 then 0.2 cover it at x = 1.5.
  Schedule s = Schedule::explicit_rates({0.4, 0.2});
  auto stop = per_direction_stop(d.sd, d.spec, s, 0);
  CHECK(stop.k_real == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("the scalar budget lands within one step of the true optimum") {
  auto d = diag_instance(Eigen::VectorXd::Ones(1), 1.0, 0.5);
  Schedule s = Schedule::constant(0.05);
  auto stop = per_direction_stop(d.sd, d.spec, s, 0);
  long long true_k = true_optimal_stop(d.sd, d.spec, s, 200);
  CHECK(std::abs(stop.k_real - static_cast<double>(true_k)) <= 1.0);
}

TEST_CASE("a flat spectrum makes the aggregate identical to every direction") {
  auto d = diag_instance(Eigen::VectorXd::Constant(3, 1.5), 1.0, 0.4);
  Schedule s = Schedule::polynomial(0.2, 0.5);
  auto agg = aggregate_stop(d.sd, d.spec, s);
  for (int j = 0; j < 3; ++j) {
    auto pj = per_direction_stop(d.sd, d.spec, s, j);
    CHECK(agg.k_real == doctest::Approx(pj.k_real).epsilon(1e-12));
    CHECK(agg.target_phi == doctest::Approx(pj.target_phi).epsilon(1e-12));
  }
  CHECK(agg.mean_sample_eig == doctest::Approx(1.5 * 1.5 / 3.0).epsilon(1e-12));
}

TEST_CASE("the aggregate stop lies between the extreme directions") {
  auto d = diag_instance(Eigen::Vector2d(2.0, 1.0), 1.0, 0.5);
  Schedule s = Schedule::constant(0.3);
  auto agg = aggregate_stop(d.sd, d.spec, s);
  auto s0 = per_direction_stop(d.sd, d.spec, s, 0);
  auto s1 = per_direction_stop(d.sd, d.spec, s, 1);
  CHECK(agg.k_real > s0.k_real);
  CHECK(agg.k_real < s1.k_real);
}

TEST_CASE("stronger directions stop no later") {
  auto d = diag_instance(Eigen::Vector3d(3.0, 2.0, 1.0), 0.8, 0.6);
  Schedule s = Schedule::polynomial(0.1, 0.25);
  double prev = 0.0;
  for (int j = 0; j < 3; ++j) {
    auto stop = per_direction_stop(d.sd, d.spec, s, j);
    CHECK(stop.k_real >= prev);
    CHECK(stop.target_phi > 0.0);
    CHECK(stop.target_phi < 1.0);
    prev = stop.k_real;
  }
}

TEST_CASE("without noise the rule never stops and the report trains to the horizon") {
  auto d = diag_instance(Eigen::Vector2d(2.0, 1.0), 1.0, 0.0);
  Schedule s = Schedule::constant(0.3);
  auto stop = per_direction_stop(d.sd, d.spec, s, 0);
  CHECK(stop.never);
  CHECK(std::isinf(stop.k_real));
  auto rep = make_stopping_report(d.sd, d.spec, s, 50);
  CHECK(rep.aggregate.never);
  CHECK(rep.estimate_k == 50);
  CHECK(rep.true_k == 50);  // risk only falls when tau = 0
}

TEST_CASE("summable rate schedules can never cover the budget") {
  auto d = diag_instance(Eigen::Vector2d(2.0, 1.0), 1.0, 0.5);
  // Exponential 0.5: cumulative rates are bounded by 1 < budget.
  auto stop = per_direction_stop(d.sd, d.spec, Schedule::exponential(0.5), 0,
                                 RateDenominator::sample_eigenvalue, 5000);
  CHECK(stop.never);
  // AdditiveDecay exhausts its positive range before covering.
  auto add = per_direction_stop(d.sd, d.spec, Schedule::additive_decay(0.02, 0.005), 0,
                                RateDenominator::sample_eigenvalue, 5000);
  CHECK(add.never);
  // Explicit lists end.
  auto exp = per_direction_stop(d.sd, d.spec, Schedule::explicit_rates({0.01, 0.01}), 0,
                                RateDenominator::sample_eigenvalue, 5000);
  CHECK(exp.never);
}

TEST_CASE("true optimal stop is the argmin of the exact risk") {
  SubRng rng(8101u, 41u);
  auto inst = testsupport::random_instance(rng, 10, 5, 0.0, 0.7, true);
  inst.spec.sigma2 = 0.5;
  Schedule s = Schedule::constant(0.6 / inst.sd.lambda_max());
  long long k = true_optimal_stop(inst.sd, inst.spec, s, 400);
  auto scan = earlystop::risk_scan(inst.sd, inst.spec, s, 400, earlystop::InitMode::random_init);
  for (long long i = 0; i <= 400; ++i)
    CHECK(scan.risk[static_cast<size_t>(k)] <= scan.risk[static_cast<size_t>(i)]);
  CHECK(k > 0);
  CHECK(k < 400);
  CHECK_THROWS_AS(true_optimal_stop(inst.sd, inst.spec, s, -1), validation_error);
}

TEST_CASE("reference stop reacts to the noise scale") {
  auto d = diag_instance(Eigen::Vector2d(2.0, 1.0), 1.0, 1e8);
  Schedule s = Schedule::constant(0.3);
  auto loud = raskutti_stop(d.sd, d.spec, s, 100);
  REQUIRE(loud.has_value());
  CHECK(*loud == 1);

  d.spec.tau2 = 1e-12;
  CHECK_FALSE(raskutti_stop(d.sd, d.spec, s, 100).has_value());
  d.spec.tau2 = 0.0;
  CHECK_FALSE(raskutti_stop(d.sd, d.spec, s, 100).has_value());
}

TEST_CASE("stopping reports tie the pieces together consistently") {
  SubRng rng(8102u, 42u);
  auto inst = testsupport::random_instance(rng, 12, 6, 0.0, 0.7, true);
  inst.spec.sigma2 = 0.4;
  Schedule s = Schedule::polynomial(0.7 / inst.sd.lambda_max(), 0.25);
  auto rep = make_stopping_report(inst.sd, inst.spec, s, 500);
  CHECK(rep.per_direction.size() == static_cast<size_t>(inst.sd.rank));
  CHECK(rep.k_max == 500);
  CHECK(rep.risk_at_true <= rep.risk_at_estimate);
  CHECK(rep.estimate_k >= 0);
  CHECK(rep.estimate_k <= 500);
  if (!rep.aggregate.never)
    CHECK(rep.estimate_k ==
          std::llround(std::min(rep.aggregate.k_real, 500.0)));
  for (const auto& ds : rep.per_direction) {
    CHECK(ds.target_phi > 0.0);
    CHECK(ds.target_phi < 1.0);
  }
}
