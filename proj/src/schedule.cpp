#include "earlystop/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "earlystop/errors.hpp"

namespace earlystop {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw validation_error(msg);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

Schedule::Schedule(Family f) : family_(std::move(f)) {
  std::visit(
      [](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Constant>) {
          require(positive_finite(fam.eta), "Constant: eta must be finite and > 0");
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          require(positive_finite(fam.eta), "Polynomial: eta must be finite and > 0");
          require(std::isfinite(fam.m) && fam.m >= 0.0, "Polynomial: m must be >= 0");
        } else if constexpr (std::is_same_v<T, AdditiveDecay>) {
          require(positive_finite(fam.eta0), "AdditiveDecay: eta0 must be finite and > 0");
          require(positive_finite(fam.eta), "AdditiveDecay: eta must be finite and > 0");
          require(fam.eta0 - fam.eta > 0.0, "AdditiveDecay: first rate eta0 - eta must be > 0");
        } else if constexpr (std::is_same_v<T, Exponential>) {
          require(positive_finite(fam.eta), "Exponential: eta must be finite and > 0");
        } else if constexpr (std::is_same_v<T, Cyclic>) {
          require(fam.inner != nullptr, "Cyclic: inner schedule required");
          require(fam.period >= 1, "Cyclic: period must be >= 1");
        } else if constexpr (std::is_same_v<T, Explicit>) {
          require(!fam.rates.empty(), "Explicit: rate list must be non-empty");
          for (double r : fam.rates)
            require(positive_finite(r), "Explicit: all rates must be finite and > 0");
        }
      },
      family_);
}

Schedule Schedule::constant(double eta) { return Schedule(Constant{eta}); }
Schedule Schedule::polynomial(double eta, double m) { return Schedule(Polynomial{eta, m}); }
Schedule Schedule::additive_decay(double eta0, double eta) {
  return Schedule(AdditiveDecay{eta0, eta});
}
Schedule Schedule::exponential(double eta) { return Schedule(Exponential{eta}); }
Schedule Schedule::cyclic(Schedule inner, long long period) {
  return Schedule(Cyclic{std::make_shared<const Schedule>(std::move(inner)), period});
}
Schedule Schedule::explicit_rates(std::vector<double> rates) {
  return Schedule(Explicit{std::move(rates)});
}

double Schedule::eta_at(long long k) const {
  if (k < 1) throw std::domain_error("eta_at: k must be >= 1");
  return std::visit(
      [k](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return fam.eta;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return fam.eta / std::pow(static_cast<double>(k), fam.m);
        } else if constexpr (std::is_same_v<T, AdditiveDecay>) {
          double v = fam.eta0 - static_cast<double>(k) * fam.eta;
          if (v <= 0.0)
            throw std::domain_error("eta_at: AdditiveDecay rate exhausted (eta_k <= 0)");
          return v;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::pow(fam.eta, static_cast<double>(k));
        } else if constexpr (std::is_same_v<T, Cyclic>) {
          return fam.inner->eta_at((k - 1) % fam.period + 1);
        } else {
          if (k > static_cast<long long>(fam.rates.size()))
            throw std::domain_error("eta_at: k past end of Explicit rate list");
          return fam.rates[static_cast<size_t>(k - 1)];
        }
      },
      family_);
}

double Schedule::cumulative(long long k) const {
  double s = 0.0;
  for (long long i = 1; i <= k; ++i) s += eta_at(i);
  return s;
}

double Schedule::eta_sup() const {
  return std::visit(
      [this](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return fam.eta;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return fam.eta;  // k = 1 maximizes eta / k^m for m >= 0
        } else if constexpr (std::is_same_v<T, AdditiveDecay>) {
          return fam.eta0 - fam.eta;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (fam.eta > 1.0) return std::numeric_limits<double>::infinity();
          return fam.eta;
        } else if constexpr (std::is_same_v<T, Cyclic>) {
          double m = 0.0;
          for (long long i = 1; i <= fam.period; ++i) m = std::max(m, eta_at(i));
          return m;
        } else {
          return *std::max_element(fam.rates.begin(), fam.rates.end());
        }
      },
      family_);
}

std::string Schedule::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Constant>) {
          os << "constant(eta=" << fam.eta << ")";
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          os << "polynomial(eta=" << fam.eta << ",m=" << fam.m << ")";
        } else if constexpr (std::is_same_v<T, AdditiveDecay>) {
          os << "additive_decay(eta0=" << fam.eta0 << ",eta=" << fam.eta << ")";
        } else if constexpr (std::is_same_v<T, Exponential>) {
          os << "exponential(eta=" << fam.eta << ")";
        } else if constexpr (std::is_same_v<T, Cyclic>) {
          os << "cyclic(period=" << fam.period << ",inner=" << fam.inner->describe() << ")";
        } else {
          os << "explicit(" << fam.rates.size() << " rates)";
        }
      },
      family_);
  return os.str();
}

}  // namespace earlystop
