#pragma once

#include <complex>

#include "earlystop/phi_value.hpp"

namespace earlystop::special {

// True iff z sits within tol of a pole of Gamma (0, -1, -2, ...).
bool near_gamma_pole(std::complex<double> z, double tol = 1e-12);

// log Gamma(z), Lanczos approximation (g = 7, 9 coefficients), reflection
// formula for Re(z) < 0.5. Branch is unspecified; exp(sum of results) is
// still the exact product of Gamma values. Throws std::domain_error at poles.
std::complex<double> log_gamma(std::complex<double> z);

// digamma(z) = d/dz log Gamma(z); recurrence shift + asymptotic series,
// reflection for Re(z) < 0.5.
std::complex<double> digamma(std::complex<double> z);

// Gamma(x) for real x as a signed log-space value.
PhiValue gamma_signed(double x);

}  // namespace earlystop::special
