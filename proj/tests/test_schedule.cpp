#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "earlystop/errors.hpp"
#include "earlystop/schedule.hpp"

using earlystop::Schedule;
using earlystop::validation_error;

TEST_CASE("constant family returns the same rate at every step") {
  Schedule s = Schedule::constant(0.1);
  CHECK(s.eta_at(1) == doctest::Approx(0.1));
  CHECK(s.eta_at(7) == doctest::Approx(0.1));
  CHECK(s.eta_sup() == doctest::Approx(0.1));
}

TEST_CASE("polynomial family divides by k^m") {
  Schedule s = Schedule::polynomial(0.5, 1.0);
  CHECK(s.eta_at(4) == doctest::Approx(0.125));
  CHECK(s.eta_at(1) == doctest::Approx(0.5));
  CHECK(s.eta_sup() == doctest::Approx(0.5));
  Schedule frac = Schedule::polynomial(0.8, 0.5);
  CHECK(frac.eta_at(4) == doctest::Approx(0.4));
}

TEST_CASE("additive decay is queryable only while positive") {
  Schedule s = Schedule::additive_decay(0.3, 0.1);
  CHECK(s.eta_at(1) == doctest::Approx(0.2));
  CHECK(s.eta_at(2) == doctest::Approx(0.1));
  CHECK_THROWS_AS(s.eta_at(3), std::domain_error);  // 0.3 - 3*0.1 = 0
  CHECK(s.eta_sup() == doctest::Approx(0.2));
}

TEST_CASE("exponential family is eta^k") {
  Schedule s = Schedule::exponential(0.5);
  CHECK(s.eta_at(1) == doctest::Approx(0.5));
  CHECK(s.eta_at(3) == doctest::Approx(0.125));
  CHECK(s.eta_sup() == doctest::Approx(0.5));
  CHECK(Schedule::exponential(1.5).eta_sup() == std::numeric_limits<double>::infinity());
}

TEST_CASE("cyclic family repeats the inner schedule with the stated period") {
  Schedule s = Schedule::cyclic(Schedule::polynomial(0.4, 1.0), 3);
  for (long long k = 1; k <= 12; ++k) CHECK(s.eta_at(k) == doctest::Approx(s.eta_at(k + 3)));
  CHECK(s.eta_at(1) == doctest::Approx(0.4));
  CHECK(s.eta_at(2) == doctest::Approx(0.2));
  CHECK(s.eta_at(3) == doctest::Approx(0.4 / 3.0));
  CHECK(s.eta_at(4) == doctest::Approx(0.4));
  CHECK(s.eta_sup() == doctest::Approx(0.4));
}

TEST_CASE("explicit family reads the given list and ends with it") {
  Schedule s = Schedule::explicit_rates({0.3, 0.2, 0.1});
  CHECK(s.eta_at(2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(s.eta_at(4), std::domain_error);
  CHECK(s.eta_sup() == doctest::Approx(0.3));
}

TEST_CASE("cumulative sums the first k rates") {
  Schedule s = Schedule::polynomial(0.5, 1.0);
  CHECK(s.cumulative(0) == doctest::Approx(0.0));
  CHECK(s.cumulative(3) == doctest::Approx(0.5 * (1.0 + 0.5 + 1.0 / 3.0)));
}

TEST_CASE("index zero and negative indices are rejected everywhere") {
  Schedule s = Schedule::constant(0.1);
  CHECK_THROWS_AS(s.eta_at(0), std::domain_error);
  CHECK_THROWS_AS(s.eta_at(-3), std::domain_error);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Schedule::constant(0.0), validation_error);
  CHECK_THROWS_AS(Schedule::constant(-0.1), validation_error);
  CHECK_THROWS_AS(Schedule::polynomial(0.5, -0.1), validation_error);
  CHECK_THROWS_AS(Schedule::additive_decay(0.1, 0.1), validation_error);  // first rate 0
  CHECK_THROWS_AS(Schedule::exponential(0.0), validation_error);
  CHECK_THROWS_AS(Schedule::cyclic(Schedule::constant(0.1), 0), validation_error);
  CHECK_THROWS_AS(Schedule::explicit_rates({}), validation_error);
  CHECK_THROWS_AS(Schedule::explicit_rates({0.1, 0.0}), validation_error);
}

TEST_CASE("describe names the family and parameters") {
  CHECK(Schedule::constant(0.1).describe().find("constant") != std::string::npos);
  CHECK(Schedule::cyclic(Schedule::exponential(0.5), 4).describe().find("cyclic") !=
        std::string::npos);
}
