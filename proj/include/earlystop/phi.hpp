#pragma once

#include <vector>

#include "earlystop/phi_value.hpp"
#include "earlystop/schedule.hpp"

namespace earlystop {

// Normalized decay factor phi(k; zeta) = prod_{i=1..k} (1 - eta_i * zeta).
// All phi values in this module carry the phi(0) = 1 normalization.
PhiValue phi_product(const Schedule& s, double zeta, long long k);

// Closed forms; k may be any real >= 0 (the continuous extension).
// Constant: (1 - eta*zeta)^k.
PhiValue phi_closed_constant(double eta, double zeta, double k);
// Polynomial eta/i^m, integer m >= 1, via Gamma factors over the m-th roots
// of unity of eta*zeta. Throws std::domain_error on Gamma poles,
// numerical_error if the imaginary residue exceeds 1e-8 relative.
PhiValue phi_closed_polynomial(double eta, long long m, double zeta, double k);
// AdditiveDecay eta0 - i*eta: (eta*zeta)^k * Gamma(k+1+b) / Gamma(1+b),
// b = (1 - eta0*zeta) / (eta*zeta).
PhiValue phi_closed_additive(double eta0, double eta, double zeta, double k);
// Exponential q^i: (zeta*q; q)_k, extended to real k through the infinite
// q-Pochhammer ratio (zeta*q; q)_inf / (zeta*q^{k+1}; q)_inf.
PhiValue phi_closed_exponential(double q, double zeta, double k);

// (a; q)_n = prod_{i=0..n-1} (1 - a q^i).
PhiValue qpochhammer_finite(double a, double q, long long n);
// (a; q)_inf for |q| < 1; truncated when the geometric tail bound drops
// below 1e-16.
PhiValue qpochhammer_infinite(double a, double q);

// Continuous extension of phi to real x >= 0 for families that have one
// (Constant, Polynomial with integer m, AdditiveDecay, Exponential).
// Throws std::domain_error otherwise.
PhiValue phi_extended(const Schedule& s, double zeta, double x);

// d/dx of the extension, differentiated analytically (digamma terms for the
// Gamma forms, the log-derivative series for the q-Pochhammer form).
double phi_derivative(const Schedule& s, double zeta, double x);

// lim_{k->inf} phi(k; zeta), evaluated by doubling k until
// |log phi(2k) - log phi(k)| < 1e-12 (k capped at ~1e6); underflow counts
// as a limit of 0.
double phi_limit(const Schedule& s, double zeta);

// Diagonal of Phi(k; lambda) over the spectrum: entry j is
// phi(k; lambda + sample_eigs[j]) with the phi(0) = 1 normalization.
// Integer k uses the product, real k the extension.
struct PhiDiagonal {
  std::vector<PhiValue> entries;
  double lambda = 0.0;
  double k = 0.0;
};
PhiDiagonal phi_diagonal(const Schedule& s, const std::vector<double>& sample_eigs,
                         double lambda, double k);

}  // namespace earlystop
