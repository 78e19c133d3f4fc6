#include "earlystop/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace earlystop::special {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos g = 7, 9 coefficients.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

// B_{2n}/(2n) for the digamma asymptotic series.
constexpr double kDigammaAsym[7] = {
    1.0 / 12.0,      -1.0 / 120.0,  1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0,     -691.0 / 32760.0, 1.0 / 12.0,
};

}  // namespace

bool near_gamma_pole(std::complex<double> z, double tol) {
  if (std::abs(z.imag()) > tol) return false;
  double r = std::round(z.real());
  return r <= 0.0 && std::abs(z.real() - r) <= tol;
}

std::complex<double> log_gamma(std::complex<double> z) {
  if (near_gamma_pole(z)) throw std::domain_error("log_gamma: pole at non-positive integer");
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  std::complex<double> zm1 = z - 1.0;
  std::complex<double> acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (zm1 + static_cast<double>(i));
  std::complex<double> t = zm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

std::complex<double> digamma(std::complex<double> z) {
  if (near_gamma_pole(z)) throw std::domain_error("digamma: pole at non-positive integer");
  if (z.real() < 0.5) {
    // psi(z) = psi(1 - z) - pi cot(pi z)
    return digamma(1.0 - z) - kPi * std::cos(kPi * z) / std::sin(kPi * z);
  }
  std::complex<double> acc = 0.0;
  while (z.real() < 10.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  std::complex<double> inv2 = 1.0 / (z * z);
  std::complex<double> series = 0.0;
  std::complex<double> power = inv2;
  for (double coeff : kDigammaAsym) {
    series += coeff * power;
    power *= inv2;
  }
  return acc + std::log(z) - 0.5 / z - series;
}

PhiValue gamma_signed(double x) {
  if (near_gamma_pole({x, 0.0})) throw std::domain_error("gamma_signed: pole at non-positive integer");
  int sign = +1;
  if (x < 0.0) sign = std::sin(kPi * x) < 0.0 ? -1 : +1;  // Gamma(1-x) > 0 here
  return {std::lgamma(x), sign};
}

}  // namespace earlystop::special
