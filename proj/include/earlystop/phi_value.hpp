#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace earlystop {

// Signed log-space scalar: value = sign * exp(log_abs).
// Products of ~1e6 factors stay representable even when the plain value
// would over/underflow a double. sign == 0 encodes an exact zero.
struct PhiValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;  // -1, 0, +1

  static PhiValue zero() { return {}; }
  static PhiValue one() { return {0.0, +1}; }

  static PhiValue from_value(double v) {
    if (v == 0.0) return zero();
    if (std::isnan(v)) throw std::domain_error("PhiValue: NaN input");
    return {std::log(std::abs(v)), v > 0.0 ? +1 : -1};
  }

  // Underflows to 0 and overflows to +-inf like a plain double would.
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  bool is_zero() const { return sign == 0; }

  PhiValue& operator*=(const PhiValue& o) {
    if (sign == 0 || o.sign == 0) {
      *this = zero();
    } else {
      log_abs += o.log_abs;
      sign *= o.sign;
    }
    return *this;
  }
  friend PhiValue operator*(PhiValue a, const PhiValue& b) { return a *= b; }

  PhiValue& mul(double f) { return *this *= from_value(f); }

  PhiValue inverse() const {
    if (sign == 0) throw std::domain_error("PhiValue: inverse of zero");
    return {-log_abs, sign};
  }
  friend PhiValue operator/(const PhiValue& a, const PhiValue& b) {
    return a * b.inverse();
  }

  PhiValue pow_int(long long e) const {
    if (sign == 0) {
      if (e < 0) throw std::domain_error("PhiValue: zero to negative power");
      return e == 0 ? one() : zero();
    }
    return {log_abs * static_cast<double>(e), (e % 2 == 0) ? +1 : sign};
  }

  // Non-integer exponents require a positive base.
  PhiValue pow_real(double e) const {
    if (e == std::floor(e) && std::abs(e) < 9.0e15)
      return pow_int(static_cast<long long>(e));
    if (sign < 0) throw std::domain_error("PhiValue: negative base, real power");
    if (sign == 0) {
      if (e <= 0.0) throw std::domain_error("PhiValue: zero base, power <= 0");
      return zero();
    }
    return {log_abs * e, +1};
  }
};

}  // namespace earlystop
