#pragma once

#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"

namespace ltfbm {

// log Gamma for positive arguments. boost's lgamma does not touch the global
// signgam, so it is safe to call from worker threads.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

inline double gamma_fn(double x) { return boost::math::tgamma(x); }

// tan(pi*alpha/2) with the alpha = 2 pole-free limit pinned to zero.
inline double stable_tan(double alpha) {
  if (std::abs(alpha - 2.0) < 1e-9) return 0.0;
  return std::tan(std::numbers::pi * alpha / 2.0);
}

// x^{2g} read as (x^2)^g, so negative x is allowed.
inline double even_power(double x, double two_g) {
  return std::pow(x * x, two_g / 2.0);
}

/// Real number or +infinity. The infinite state is a tag, never an IEEE inf.
class ExtendedReal {
 public:
  static constexpr ExtendedReal finite(double v) { return ExtendedReal(false, v); }
  static constexpr ExtendedReal plus_infinity() { return ExtendedReal(true, 0.0); }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw DomainError("ExtendedReal: value() on +infinity");
    return value_;
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

  friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    if (x.infinite_) return os << "+inf";
    return os << x.value_;
  }

 private:
  constexpr ExtendedReal(bool inf, double v) : infinite_(inf), value_(v) {}

  bool infinite_;
  double value_;
};

}  // namespace ltfbm
