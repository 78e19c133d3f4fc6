#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace earlystop {

// Learning-rate schedule {eta_k}, 1-indexed: eta_at(1) is the first applied rate.
class Schedule {
 public:
  struct Constant {
    double eta;  // eta_k = eta
  };
  struct Polynomial {
    double eta;  // eta_k = eta / k^m, m >= 0 real
    double m;
  };
  struct AdditiveDecay {
    double eta0;  // eta_k = eta0 - k*eta, queryable only while eta_k > 0
    double eta;
  };
  struct Exponential {
    double eta;  // eta_k = eta^k
  };
  struct Cyclic {
    std::shared_ptr<const Schedule> inner;  // eta_k = inner(((k-1) mod period) + 1)
    long long period;
  };
  struct Explicit {
    std::vector<double> rates;  // eta_k = rates[k-1]
  };
  using Family =
      std::variant<Constant, Polynomial, AdditiveDecay, Exponential, Cyclic, Explicit>;

  explicit Schedule(Family f);

  static Schedule constant(double eta);
  static Schedule polynomial(double eta, double m);
  static Schedule additive_decay(double eta0, double eta);
  static Schedule exponential(double eta);
  static Schedule cyclic(Schedule inner, long long period);
  static Schedule explicit_rates(std::vector<double> rates);

  // Throws std::domain_error for k < 1, past an Explicit list, or an
  // AdditiveDecay rate that is no longer positive.
  double eta_at(long long k) const;

  // sum_{i=1..k} eta_i; k = 0 gives 0.
  double cumulative(long long k) const;

  // sup_k eta_k over the valid range; +inf for Exponential with eta > 1.
  double eta_sup() const;

  const Family& family() const { return family_; }
  std::string describe() const;

 private:
  Family family_;
};

}  // namespace earlystop
