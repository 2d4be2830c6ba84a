#pragma once

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "special.hpp"

namespace ltfbm {

/// Strictly stable Levy process with characteristic exponent
///   t |xi|^alpha (1 + i nu sgn(xi) tan(pi alpha / 2)) / chi.
/// Only 1 < alpha <= 2 is representable: the local time at zero exists there.
class StableParams {
 public:
  StableParams(double alpha, double nu, double chi) : alpha_(alpha), nu_(nu), chi_(chi) {
    if (!(alpha > 1.0 && alpha <= 2.0)) {
      std::ostringstream os;
      os << "StableParams: alpha must lie in (1, 2], got " << alpha;
      throw ArgumentError(os.str());
    }
    if (!(nu >= -1.0 && nu <= 1.0)) {
      std::ostringstream os;
      os << "StableParams: nu must lie in [-1, 1], got " << nu;
      throw ArgumentError(os.str());
    }
    if (!(chi > 0.0) || !std::isfinite(chi)) {
      std::ostringstream os;
      os << "StableParams: chi must be positive, got " << chi;
      throw ArgumentError(os.str());
    }
  }

  double alpha() const { return alpha_; }
  double nu() const { return nu_; }
  double chi() const { return chi_; }

  /// nu * tan(pi alpha / 2), exactly zero at alpha = 2.
  double skew_tan() const { return nu_ * stable_tan(alpha_); }

  /// Self-similarity index of the local time, 1 - 1/alpha.
  double lt_index() const { return 1.0 - 1.0 / alpha_; }

  friend bool operator==(const StableParams&, const StableParams&) = default;

 private:
  double alpha_;
  double nu_;
  double chi_;
};

/// Stable parameters plus the Hurst index of the outer fBm.
class ModelParams {
 public:
  ModelParams(StableParams stable, double hurst) : stable_(stable), hurst_(hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
      std::ostringstream os;
      os << "ModelParams: hurst must lie in (0, 1), got " << hurst;
      throw ArgumentError(os.str());
    }
  }

  ModelParams(double alpha, double nu, double chi, double hurst)
      : ModelParams(StableParams(alpha, nu, chi), hurst) {}

  const StableParams& stable() const { return stable_; }
  double alpha() const { return stable_.alpha(); }
  double hurst() const { return hurst_; }

  /// H (1 - 1/alpha).
  double selfsim_index() const { return hurst_ * stable_.lt_index(); }

  /// 2H < alpha: the Gaussian-MGF route and Gartner-Ellis apply.
  bool ldp_valid() const { return 2.0 * hurst_ < alpha(); }

  /// 2 alpha / (alpha - 2H), the theta-exponent of the limiting log-MGF.
  double mgf_exponent() const {
    require_ldp("mgf_exponent");
    return 2.0 * alpha() / (alpha() - 2.0 * hurst_);
  }

  /// 2H (alpha - 1) / (alpha - 2H), the speed exponent in t.
  double ldp_time_exponent() const {
    require_ldp("ldp_time_exponent");
    return 2.0 * hurst_ * (alpha() - 1.0) / (alpha() - 2.0 * hurst_);
  }

  /// 2 alpha / (alpha + 2H), the stretched-exponential tail exponent.
  double tail_exponent() const { return 2.0 * alpha() / (alpha() + 2.0 * hurst_); }

  /// Largest beta for which E exp(t |increment|^beta) is entire.
  double beta_threshold() const { return 2.0 * alpha() / (2.0 * hurst_ + alpha()); }

  /// 2H (alpha - 1) / (alpha + 2H), the (b - a) exponent of tail constants.
  double interval_exponent() const {
    return 2.0 * hurst_ * (alpha() - 1.0) / (alpha() + 2.0 * hurst_);
  }

  /// (alpha + 2H) / (2 alpha), the power on the log factor in moduli and LIL.
  double log_power() const { return (alpha() + 2.0 * hurst_) / (2.0 * alpha()); }

 private:
  void require_ldp(const char* what) const {
    if (!ldp_valid()) {
      std::ostringstream os;
      os << what << ": requires 2H < alpha (H=" << hurst_ << ", alpha=" << alpha()
         << "); the Gaussian-MGF of Z is infinite";
      throw DomainError(os.str());
    }
  }

  StableParams stable_;
  double hurst_;
};

}  // namespace ltfbm
