#include "earlystop/phi.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "earlystop/errors.hpp"
#include "earlystop/special_functions.hpp"

namespace earlystop {

namespace {

constexpr double kPi = std::numbers::pi;

void require_domain(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

// Collapse exp(log_mag + i*phase) to a signed real. The exact value has a
// real limit; |sin(phase)| is its relative imaginary residue.
PhiValue collapse_real(double log_mag, double phase, double residue_tol) {
  double residue = std::abs(std::sin(phase));
  if (residue > residue_tol)
    throw numerical_error("imaginary residue above tolerance in Gamma-product form");
  double c = std::cos(phase);
  return {log_mag + std::log(std::abs(c)), c >= 0.0 ? +1 : -1};
}

}  // namespace

PhiValue phi_product(const Schedule& s, double zeta, long long k) {
  require_domain(k >= 0, "phi_product: k must be >= 0");
  PhiValue acc = PhiValue::one();
  for (long long i = 1; i <= k; ++i) acc.mul(1.0 - s.eta_at(i) * zeta);
  return acc;
}

PhiValue phi_closed_constant(double eta, double zeta, double k) {
  require_domain(std::isfinite(k) && k >= 0.0, "phi_closed_constant: k must be >= 0");
  if (k == 0.0) return PhiValue::one();
  return PhiValue::from_value(1.0 - eta * zeta).pow_real(k);
}

PhiValue phi_closed_polynomial(double eta, long long m, double zeta, double k) {
  require_domain(m >= 1, "phi_closed_polynomial: integer m >= 1 required");
  require_domain(std::isfinite(k) && k >= 0.0, "phi_closed_polynomial: k must be >= 0");
  if (zeta == 0.0 || k == 0.0) return PhiValue::one();

  double x = eta * zeta;
  std::complex<double> c = std::pow(std::complex<double>(x, 0.0), 1.0 / static_cast<double>(m));
  std::complex<double> total =
      -static_cast<double>(m) * special::log_gamma({k + 1.0, 0.0});
  for (long long i = 0; i < m; ++i) {
    double ang = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    std::complex<double> root = std::polar(1.0, ang) * c;
    std::complex<double> z1 = std::complex<double>(k + 1.0, 0.0) - root;
    std::complex<double> z0 = std::complex<double>(1.0, 0.0) - root;
    if (special::near_gamma_pole(z1) || special::near_gamma_pole(z0))
      throw std::domain_error("phi_closed_polynomial: Gamma argument at a pole");
    total += special::log_gamma(z1) - special::log_gamma(z0);
  }
  return collapse_real(total.real(), total.imag(), 1e-8);
}

PhiValue phi_closed_additive(double eta0, double eta, double zeta, double k) {
  require_domain(std::isfinite(k) && k >= 0.0, "phi_closed_additive: k must be >= 0");
  if (zeta == 0.0 || k == 0.0) return PhiValue::one();

  double x = eta * zeta;
  double b = (1.0 - eta0 * zeta) / x;
  // (eta*zeta)^k * Gamma(k+1+b) / Gamma(1+b); gamma_signed rejects poles,
  // pow_real rejects a negative base at non-integer k.
  PhiValue scale = PhiValue::from_value(x).pow_real(k);
  return scale * special::gamma_signed(k + 1.0 + b) / special::gamma_signed(1.0 + b);
}

PhiValue qpochhammer_finite(double a, double q, long long n) {
  require_domain(n >= 0, "qpochhammer_finite: n must be >= 0");
  PhiValue acc = PhiValue::one();
  double aqi = a;
  for (long long i = 0; i < n; ++i) {
    acc.mul(1.0 - aqi);
    aqi *= q;
  }
  return acc;
}

PhiValue qpochhammer_infinite(double a, double q) {
  require_domain(std::abs(q) < 1.0, "qpochhammer_infinite: |q| < 1 required");
  if (a == 0.0) return PhiValue::one();
  // Tail bound: |log prod_{i>=K} (1 - a q^i)| <~ |a||q|^K / (1 - |q|) < 1e-16.
  double bound = 1e-16 * (1.0 - std::abs(q)) / std::abs(a);
  long long terms = 1;
  if (bound < 1.0) {
    double need = std::log(bound) / std::log(std::abs(q));
    require_domain(need < 2e7, "qpochhammer_infinite: |q| too close to 1");
    terms = static_cast<long long>(need) + 1;
  }
  PhiValue acc = PhiValue::one();
  double aqi = a;
  for (long long i = 0; i < terms; ++i) {
    acc.mul(1.0 - aqi);
    if (acc.is_zero()) return acc;
    aqi *= q;
  }
  return acc;
}

PhiValue phi_closed_exponential(double q, double zeta, double k) {
  require_domain(std::isfinite(k) && k >= 0.0, "phi_closed_exponential: k must be >= 0");
  require_domain(q > 0.0, "phi_closed_exponential: q > 0 required");
  if (zeta == 0.0 || k == 0.0) return PhiValue::one();
  // Normalized phi(k) = prod_{i=1..k} (1 - zeta q^i) = (zeta*q; q)_k.
  if (is_integer(k)) return qpochhammer_finite(zeta * q, q, static_cast<long long>(k));
  require_domain(q < 1.0, "phi_closed_exponential: real-k extension requires q < 1");
  PhiValue num = qpochhammer_infinite(zeta * q, q);
  PhiValue den = qpochhammer_infinite(zeta * std::pow(q, k + 1.0), q);
  if (den.is_zero())
    throw std::domain_error("phi_closed_exponential: zero factor in the extension tail");
  return num / den;
}

PhiValue phi_extended(const Schedule& s, double zeta, double x) {
  require_domain(std::isfinite(x) && x >= 0.0, "phi_extended: x must be >= 0");
  if (zeta == 0.0) return PhiValue::one();
  using F = Schedule;
  if (const auto* c = std::get_if<F::Constant>(&s.family()))
    return phi_closed_constant(c->eta, zeta, x);
  if (const auto* p = std::get_if<F::Polynomial>(&s.family())) {
    if (p->m == 0.0) return phi_closed_constant(p->eta, zeta, x);
    require_domain(is_integer(p->m),
                   "phi_extended: Polynomial extension requires integer m");
    return phi_closed_polynomial(p->eta, static_cast<long long>(p->m), zeta, x);
  }
  if (const auto* a = std::get_if<F::AdditiveDecay>(&s.family()))
    return phi_closed_additive(a->eta0, a->eta, zeta, x);
  if (const auto* e = std::get_if<F::Exponential>(&s.family()))
    return phi_closed_exponential(e->eta, zeta, x);
  throw std::domain_error("phi_extended: no continuous extension for this family");
}

double phi_derivative(const Schedule& s, double zeta, double x) {
  require_domain(std::isfinite(x) && x >= 0.0, "phi_derivative: x must be >= 0");
  if (zeta == 0.0) return 0.0;
  using F = Schedule;

  auto constant_case = [&](double eta) {
    double base = 1.0 - eta * zeta;
    require_domain(base > 0.0, "phi_derivative: Constant requires 1 - eta*zeta > 0");
    return std::exp(x * std::log(base)) * std::log(base);
  };

  if (const auto* c = std::get_if<F::Constant>(&s.family())) return constant_case(c->eta);

  if (const auto* p = std::get_if<F::Polynomial>(&s.family())) {
    if (p->m == 0.0) return constant_case(p->eta);
    require_domain(is_integer(p->m),
                   "phi_derivative: Polynomial derivative requires integer m");
    long long m = static_cast<long long>(p->m);
    double phi = phi_closed_polynomial(p->eta, m, zeta, x).value();
    std::complex<double> c0 =
        std::pow(std::complex<double>(p->eta * zeta, 0.0), 1.0 / static_cast<double>(m));
    std::complex<double> sum =
        -static_cast<double>(m) * special::digamma({x + 1.0, 0.0});
    for (long long i = 0; i < m; ++i) {
      double ang = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
      std::complex<double> z = std::complex<double>(x + 1.0, 0.0) - std::polar(1.0, ang) * c0;
      if (special::near_gamma_pole(z))
        throw std::domain_error("phi_derivative: digamma argument at a pole");
      sum += special::digamma(z);
    }
    if (std::abs(sum.imag()) > 1e-8 * (1.0 + std::abs(sum.real())))
      throw numerical_error("phi_derivative: imaginary residue in digamma sum");
    return phi * sum.real();
  }

  if (const auto* a = std::get_if<F::AdditiveDecay>(&s.family())) {
    double xz = a->eta * zeta;
    require_domain(xz > 0.0, "phi_derivative: AdditiveDecay requires eta*zeta > 0");
    double b = (1.0 - a->eta0 * zeta) / xz;
    double phi = phi_closed_additive(a->eta0, a->eta, zeta, x).value();
    return phi * (std::log(xz) + special::digamma({x + 1.0 + b, 0.0}).real());
  }

  if (const auto* e = std::get_if<F::Exponential>(&s.family())) {
    double q = e->eta;
    require_domain(q > 0.0 && q < 1.0, "phi_derivative: Exponential requires 0 < eta < 1");
    double phi = phi_closed_exponential(q, zeta, x).value();
    // d/dx log phi = a * log(q) * sum_{j>=0} q^j / (1 - a q^j), a = zeta q^{x+1}.
    double a0 = zeta * std::pow(q, x + 1.0);
    double sum = 0.0;
    double qj = 1.0;
    for (int j = 0; j < 1000000; ++j) {
      double den = 1.0 - a0 * qj;
      require_domain(std::abs(den) > 1e-300, "phi_derivative: pole in q-series");
      double term = qj / den;
      sum += term;
      qj *= q;
      if (std::abs(qj / (1.0 - std::abs(a0) * qj)) < 1e-18 * std::abs(sum)) break;
    }
    return phi * a0 * std::log(q) * sum;
  }

  throw std::domain_error("phi_derivative: no continuous extension for this family");
}

double phi_limit(const Schedule& s, double zeta) {
  if (zeta == 0.0) return 1.0;
  // Polynomial with integer m >= 2: the m-th roots r_j of eta*zeta sum to
  // zero, so the Weierstrass identity gives the exact limit
  // prod_{i>=1} (1 - eta*zeta/i^m) = prod_j 1/Gamma(1 - r_j).
  if (const auto* p = std::get_if<Schedule::Polynomial>(&s.family())) {
    if (p->m >= 2.0 && is_integer(p->m)) {
      long long m = static_cast<long long>(p->m);
      double x = p->eta * zeta;
      std::complex<double> c =
          std::pow(std::complex<double>(x, 0.0), 1.0 / static_cast<double>(m));
      std::complex<double> total = 0.0;
      for (long long i = 0; i < m; ++i) {
        double ang = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
        std::complex<double> z0 = std::complex<double>(1.0, 0.0) - std::polar(1.0, ang) * c;
        // A pole of Gamma(1 - r_j) means r_j is a positive integer i, i.e.
        // the factor at that i is exactly zero.
        if (special::near_gamma_pole(z0)) return 0.0;
        total -= special::log_gamma(z0);
      }
      return collapse_real(total.real(), total.imag(), 1e-8).value();
    }
  }
  constexpr long long kCap = 1LL << 20;
  double logsum = 0.0;
  int sign = +1;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double inc_last = std::numeric_limits<double>::quiet_NaN();
  double inc_prev = std::numeric_limits<double>::quiet_NaN();
  long long checkpoint = 1024;
  for (long long k = 1; k <= kCap; ++k) {
    double f = 1.0 - s.eta_at(k) * zeta;
    if (f == 0.0) return 0.0;
    logsum += std::log(std::abs(f));
    if (f < 0.0) sign = -sign;
    if (logsum < -800.0) return 0.0;
    if (k == checkpoint) {
      if (!std::isnan(prev)) {
        inc_prev = inc_last;
        inc_last = logsum - prev;
        if (std::abs(inc_last) < 1e-12)
          return sign * std::exp(logsum);
      }
      prev = logsum;
      checkpoint *= 2;
    }
  }
  // Not converged at the cap. Dyadic increments shrinking geometrically
  // (ratio r per doubling) leave a tail of inc_last * r / (1 - r); steady or
  // growing negative increments mean the rate sum diverges, so phi -> 0.
  if (!std::isnan(inc_prev) && inc_prev != 0.0) {
    double r = inc_last / inc_prev;
    if (r > 0.0 && r < 0.99)
      return sign * std::exp(logsum + inc_last * r / (1.0 - r));
  }
  if (inc_last < 0.0) return 0.0;
  throw numerical_error("phi_limit: no finite limit detected at the iteration cap");
}

PhiDiagonal phi_diagonal(const Schedule& s, const std::vector<double>& sample_eigs,
                         double lambda, double k) {
  require_domain(std::isfinite(k) && k >= 0.0, "phi_diagonal: k must be >= 0");
  PhiDiagonal d;
  d.lambda = lambda;
  d.k = k;
  d.entries.reserve(sample_eigs.size());
  bool int_k = is_integer(k);
  for (double eig : sample_eigs) {
    double zeta = lambda + eig;
    d.entries.push_back(int_k ? phi_product(s, zeta, static_cast<long long>(k))
                              : phi_extended(s, zeta, k));
  }
  return d;
}

}  // namespace earlystop
