#pragma once

// Order and type of entire functions f(r) = sum c_p r^p from their Taylor
// coefficients, and the coefficient sequences of the moment generating
// functions of L, Z and |Z(b) - Z(a)|^beta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "params.hpp"
#include "special.hpp"
#include "stats.hpp"

namespace ltfbm {

enum class SupportPattern { all, lacunary };

/// p -> log c_p, with nullopt marking a zero coefficient.
struct CoefficientOracle {
  std::function<std::optional<double>(std::size_t)> log_c;
  SupportPattern pattern = SupportPattern::all;
  double lacunary_h = 1.0;  // support p = floor(n / h) when pattern is lacunary
  std::string name;

  /// Support indices p >= 1 up to p_max where the coefficient is nonzero.
  std::vector<std::size_t> support(std::size_t p_max) const {
    std::vector<std::size_t> out;
    if (pattern == SupportPattern::all) {
      for (std::size_t p = 1; p <= p_max; ++p) {
        if (log_c(p)) out.push_back(p);
      }
      return out;
    }
    for (std::size_t n = 1;; ++n) {
      const auto p = static_cast<std::size_t>(std::floor(static_cast<double>(n) / lacunary_h));
      if (p > p_max) break;
      if (p >= 1 && (out.empty() || p > out.back()) && log_c(p)) out.push_back(p);
    }
    return out;
  }
};

/// Largest p_{k+1}/p_k - 1 over the last half of the support, times p_k.
/// The gap condition asks p_{k+1}/p_k -> 1; this stays bounded for regular patterns.
inline double support_gap(const std::vector<std::size_t>& sup) {
  double worst = 0.0;
  for (std::size_t k = sup.size() / 2; k + 1 < sup.size(); ++k) {
    const double r = static_cast<double>(sup[k + 1]) / static_cast<double>(sup[k]) - 1.0;
    worst = std::max(worst, r * static_cast<double>(sup[k]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Standard coefficient sequences
// ---------------------------------------------------------------------------

/// e^z: c_p = 1/p!.
inline CoefficientOracle exp_oracle() {
  return {[](std::size_t p) -> std::optional<double> { return -log_gamma(p + 1.0); },
          SupportPattern::all, 1.0, "exp"};
}

/// e^{z^2}: c_{2k} = 1/k!, odd coefficients zero.
inline CoefficientOracle exp_square_oracle() {
  return {[](std::size_t p) -> std::optional<double> {
            if (p % 2 != 0) return std::nullopt;
            return -log_gamma(static_cast<double>(p / 2) + 1.0);
          },
          SupportPattern::all, 1.0, "exp_square"};
}

/// Multiplies every c_p by k^p.
inline CoefficientOracle scaled_oracle(CoefficientOracle o, double k) {
  const double lk = std::log(k);
  auto inner = o.log_c;
  o.log_c = [inner, lk](std::size_t p) -> std::optional<double> {
    auto v = inner(p);
    if (!v) return v;
    return *v + static_cast<double>(p) * lk;
  };
  o.name += "_scaled";
  return o;
}

/// M1(r) = E exp(r L_1^{2H}) = sum E(L_1^{2Hn}) r^n / n!, using the Gamma continuation
/// of the local-time moments.
inline CoefficientOracle m1_oracle(const ModelParams& m) {
  const StableParams p = m.stable();
  const double h2 = 2.0 * m.hurst();
  return {[p, h2](std::size_t n) -> std::optional<double> {
            const double nd = static_cast<double>(n);
            return log_lt_moment_exact(p, h2 * nd, 1.0) - log_gamma(nd + 1.0);
          },
          SupportPattern::all, 1.0, "m1"};
}

/// Closed-form order alpha/(alpha - 2H) and type of M1.
inline std::pair<double, double> m1_order_type(const ModelParams& m) {
  if (!m.ldp_valid()) throw DomainError("m1_order_type: requires 2H < alpha");
  const double al = m.alpha();
  const double h = m.hurst();
  const double lt = m.stable().lt_index();
  const double rho1 = al / (al - 2.0 * h);
  const double inner = a1(m.stable()) * std::pow(2.0 * h, 1.0 / al) / std::pow(lt, lt);
  return {rho1, std::pow(inner, 2.0 * h * rho1) / rho1};
}

/// log E(L_b - L_a)^q for real q >= 0. Exact for a = 0; for a > 0, integer q uses the
/// quadrature formula and non-integer q the geometric interpolation of the Jensen
/// brackets (E D^n)^{q/n} and (E D^{n+1})^{q/(n+1)}, n = floor(q).
class IntervalMomentTable {
 public:
  IntervalMomentTable(StableParams p, double a, double b, double q_max)
      : p_(p), a_(a), b_(b) {
    detail::require_interval(a, b, "IntervalMomentTable");
    if (a_ > 0.0) {
      const auto n_max = static_cast<std::size_t>(std::ceil(q_max)) + 1;
      log_int_.assign(n_max + 1, 0.0);
      for (std::size_t n = 1; n <= n_max; ++n) {
        log_int_[n] = log_lt_moment_interval(p_, static_cast<int>(n), a_, b_, 1e-10);
      }
    }
  }

  double log_moment(double q) const {
    if (q < 0.0) throw ArgumentError("IntervalMomentTable: q must be >= 0");
    if (q == 0.0) return 0.0;
    if (a_ == 0.0) return log_lt_moment_exact(p_, q, b_);
    const double fl = std::floor(q);
    const auto n = static_cast<std::size_t>(fl);
    if (n + 1 >= log_int_.size()) throw RangeError("IntervalMomentTable: q beyond table");
    if (q == fl) return log_int_[n];
    const double f = q - fl;
    const double lo = n == 0 ? 0.0 : q / fl * log_int_[n];
    const double hi = q / (fl + 1.0) * log_int_[n + 1];
    return (1.0 - f) * lo + f * hi;
  }

  /// Width of the Jensen bracket in log units at order q (0 for integers or a = 0).
  double log_bracket_width(double q) const {
    if (a_ == 0.0 || q == std::floor(q)) return 0.0;
    const double fl = std::floor(q);
    const auto n = static_cast<std::size_t>(fl);
    const double lo = n == 0 ? 0.0 : q / fl * log_int_[n];
    return q / (fl + 1.0) * log_int_[n + 1] - lo;
  }

 private:
  StableParams p_;
  double a_;
  double b_;
  std::vector<double> log_int_;
};

/// c_n = E|W^H(L_b) - W^H(L_a)|^{beta n} / n! = E|N|^{beta n} E|L_b - L_a|^{beta H n} / n!.
inline CoefficientOracle g_beta_oracle(const ModelParams& m, double beta,
                                       std::shared_ptr<const IntervalMomentTable> table) {
  const double h = m.hurst();
  return {[table, beta, h](std::size_t n) -> std::optional<double> {
            const double nd = static_cast<double>(n);
            return log_fbm_abs_moment(beta * nd) + table->log_moment(beta * h * nd) -
                   log_gamma(nd + 1.0);
          },
          SupportPattern::all, 1.0, "g_beta"};
}

inline CoefficientOracle g_beta_oracle(const ModelParams& m, double beta, double a, double b,
                                       std::size_t p_max) {
  return g_beta_oracle(m, beta,
                       std::make_shared<const IntervalMomentTable>(
                           m.stable(), a, b, beta * m.hurst() * static_cast<double>(p_max)));
}

/// c_n = E(L_b - L_a)^n / n!.
inline CoefficientOracle lt_mgf_oracle(const StableParams& p, double a, double b,
                                       std::size_t p_max) {
  auto table = std::make_shared<const IntervalMomentTable>(p, a, b, static_cast<double>(p_max));
  return {[table](std::size_t n) -> std::optional<double> {
            const double nd = static_cast<double>(n);
            return table->log_moment(nd) - log_gamma(nd + 1.0);
          },
          SupportPattern::all, 1.0, "lt_mgf"};
}

// ---------------------------------------------------------------------------
// Series evaluation
// ---------------------------------------------------------------------------

struct SeriesSum {
  double log_sum;
  std::size_t truncation_index;
};

/// log sum_{p >= 0} c_p r^p by streaming log-sum-exp. c_0 is taken from the oracle
/// when defined, else 1. Stops once past the peak the geometric tail bound
/// term * q/(1-q), q the last ratio of consecutive terms, drops below tol * sum.
inline SeriesSum series_log_sum(const CoefficientOracle& o, double r, double tol,
                                std::size_t p_cap = 200000) {
  if (!(r > 0.0)) throw ArgumentError("series_log_sum: r must be positive");
  if (!(tol > 0.0)) throw ArgumentError("series_log_sum: tol must be positive");
  const double lr = std::log(r);
  double acc = o.log_c(0).value_or(0.0);  // log of running sum
  double prev_term = -std::numeric_limits<double>::infinity();
  std::size_t prev_p = 0;
  int rising = 0;
  for (std::size_t p = 1; p <= p_cap; ++p) {
    const auto lc = o.log_c(p);
    if (!lc) continue;
    const double term = *lc + static_cast<double>(p) * lr;
    const double hi = std::max(acc, term);
    acc = hi + std::log1p(std::exp(std::min(acc, term) - hi));
    if (std::isfinite(prev_term)) {
      // per-index log ratio so lacunary gaps are handled
      const double log_q = (term - prev_term) / static_cast<double>(p - prev_p);
      if (log_q < 0.0) {
        rising = 0;
        const double q = std::exp(log_q);
        const double log_tail = term + log_q - std::log1p(-q);
        if (log_tail - acc < std::log(tol)) return {acc, p};
      } else {
        ++rising;
      }
    }
    prev_term = term;
    prev_p = p;
  }
  std::ostringstream os;
  os << "series_log_sum: no convergence by p=" << p_cap << " at r=" << r
     << "; radius of convergence may not exceed r";
  throw NonConvergence(os.str(), static_cast<double>(rising));
}

// ---------------------------------------------------------------------------
// Valiron order and type
// ---------------------------------------------------------------------------

struct OrderEstimate {
  double rho;          // from the last half of the support
  double rho_quarter;  // same fit on the last quarter
  bool diverging;      // the two disagree by more than 5%
};

namespace detail {
inline double order_fit(const CoefficientOracle& o, const std::vector<std::size_t>& sup,
                        std::size_t from) {
  const auto n = static_cast<Eigen::Index>(sup.size() - from);
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = static_cast<double>(sup[from + static_cast<std::size_t>(i)]);
    const double lp = std::log(p);
    X(i, 0) = lp;
    X(i, 1) = 1.0;
    X(i, 2) = lp / p;
    X(i, 3) = 1.0 / p;
    y(i) = -*o.log_c(sup[from + static_cast<std::size_t>(i)]) / p;
  }
  return 1.0 / least_squares(X, y).coef(0);
}
}  // namespace detail

/// Order from -log c_p / p = (1/rho) log p - k + eta log(p)/p + d/p, fitted on the
/// tail of the support. Equivalent to the classical limsup p log p / (-log c_p) but
/// free of its slowly decaying 1/log p bias.
inline OrderEstimate valiron_order(const CoefficientOracle& o, std::size_t p_max) {
  const std::vector<std::size_t> sup = o.support(p_max);
  if (sup.size() < 50) {
    std::ostringstream os;
    os << "valiron_order: only " << sup.size() << " support points up to p_max=" << p_max
       << "; need at least 50";
    throw ArgumentError(os.str());
  }
  const double half = detail::order_fit(o, sup, sup.size() / 2);
  const double quarter = detail::order_fit(o, sup, 3 * sup.size() / 4);
  return {half, quarter, !(std::abs(quarter / half - 1.0) <= 0.05) || !(half > 0.0)};
}

struct ValironPoint {
  std::size_t p;
  double log_c;
  double stat;
};

struct GrowthEstimate {
  double order_rho = 0.0;
  double type_B = 0.0;
  std::vector<ValironPoint> diag;  // statistic (1/(rho e)) p c_p^{rho/p} on the support
  bool converged = false;
  double oscillation = 0.0;    // (max - min)/median over the last quartile
  double tolerance = 0.1;      // oscillation must fall below this for converged
  bool sup_condition = false;  // no statistic above 1.05 B beyond the first decile
  double sup_ratio = 0.0;      // that maximum divided by B
  double type_uncertainty = 0.0;  // relative, from Jensen bracketing where applicable
  double series_order = 0.0;  // order and type of the underlying series before any
  double series_type = 0.0;   // change of variable
};

/// Type at a given order: last-quartile median of (1/(rho e)) p c_p^{rho/p}.
inline GrowthEstimate valiron_type(const CoefficientOracle& o, double rho, std::size_t p_max,
                                   double tolerance = 0.1) {
  if (!(rho > 0.0)) throw ArgumentError("valiron_type: rho must be positive");
  const std::vector<std::size_t> sup = o.support(p_max);
  if (sup.size() < 20) throw ArgumentError("valiron_type: too few support points");
  GrowthEstimate g;
  g.order_rho = rho;
  g.tolerance = tolerance;
  const double lre = std::log(rho * std::numbers::e);
  for (std::size_t p : sup) {
    const double lc = *o.log_c(p);
    const double pd = static_cast<double>(p);
    g.diag.push_back({p, lc, std::exp(std::log(pd) + rho / pd * lc - lre)});
  }
  std::vector<double> tail;
  for (std::size_t i = 3 * g.diag.size() / 4; i < g.diag.size(); ++i) tail.push_back(g.diag[i].stat);
  g.type_B = quantile(tail, 0.5);
  const auto [mn, mx] = std::minmax_element(tail.begin(), tail.end());
  g.oscillation = (*mx - *mn) / g.type_B;
  g.converged = std::isfinite(g.type_B) && g.type_B > 0.0 && g.oscillation < tolerance;
  double sup_stat = 0.0;
  for (std::size_t i = g.diag.size() / 10; i < g.diag.size(); ++i) {
    sup_stat = std::max(sup_stat, g.diag[i].stat);
  }
  g.sup_ratio = sup_stat / g.type_B;
  g.sup_condition = g.sup_ratio <= 1.05;
  g.series_order = rho;
  g.series_type = g.type_B;
  return g;
}

/// Order then type in one pass.
inline GrowthEstimate valiron_growth(const CoefficientOracle& o, std::size_t p_max) {
  const OrderEstimate ord = valiron_order(o, p_max);
  if (ord.diverging) {
    std::ostringstream os;
    os << "valiron_growth: order estimate unstable (" << ord.rho << " vs " << ord.rho_quarter
       << ")";
    throw NonConvergence(os.str(), std::abs(ord.rho_quarter / ord.rho - 1.0));
  }
  return valiron_type(o, ord.rho, p_max);
}

enum class AnalyticityClass { entire, finite_abscissa, nowhere_finite };

inline const char* to_string(AnalyticityClass c) {
  switch (c) {
    case AnalyticityClass::entire: return "entire";
    case AnalyticityClass::finite_abscissa: return "finite_abscissa";
    case AnalyticityClass::nowhere_finite: return "nowhere_finite";
  }
  return "?";
}

/// Where t -> E exp(t |Z(b) - Z(a)|^beta) is finite, from beta against 2 alpha/(2H + alpha).
inline AnalyticityClass analyticity_class(const ModelParams& m, double beta) {
  if (!(beta > 0.0)) throw ArgumentError("analyticity_class: beta must be positive");
  const double thr = m.beta_threshold();
  if (std::abs(beta - thr) <= 1e-12 * thr) return AnalyticityClass::finite_abscissa;
  return beta < thr ? AnalyticityClass::entire : AnalyticityClass::nowhere_finite;
}

/// log E exp(theta Z(t)) ~ B1 theta^{2 alpha/(alpha-2H)} t^{...}: growth of M1 mapped
/// through r = theta^2 t^{2H(1-1/alpha)} / 2, i.e. exponent 2 rho and constant B / 2^rho.
inline GrowthEstimate z_logmgf_growth(const ModelParams& m, std::size_t p_max = 800) {
  if (!m.ldp_valid()) {
    throw DomainError("z_logmgf_growth: 2H >= alpha, E exp(theta Z(t)) is infinite for theta != 0");
  }
  GrowthEstimate g = valiron_growth(m1_oracle(m), p_max);
  g.series_order = g.order_rho;
  g.series_type = g.type_B;
  g.type_B = g.series_type / std::pow(2.0, g.series_order);
  g.order_rho = 2.0 * g.series_order;
  return g;
}

/// Growth of t -> E exp(t |Z(b) - Z(a)|^beta), targeting (rho, B3).
inline GrowthEstimate g_beta_growth(const ModelParams& m, double beta, double a, double b,
                                    std::size_t p_max = 800) {
  detail::require_interval(a, b, "g_beta_growth");
  if (analyticity_class(m, beta) != AnalyticityClass::entire) {
    std::ostringstream os;
    os << "g_beta_growth: beta=" << beta << " is not below 2 alpha/(2H+alpha)=" << m.beta_threshold();
    throw DomainError(os.str());
  }
  auto table = std::make_shared<const IntervalMomentTable>(
      m.stable(), a, b, beta * m.hurst() * static_cast<double>(p_max));
  GrowthEstimate g = valiron_growth(g_beta_oracle(m, beta, table), p_max);
  if (a > 0.0) {
    // bracket width at the tail propagates to the type through c_p^{rho/p}
    const IntervalMomentTable& t = *table;
    double w = 0.0;
    for (std::size_t i = 3 * g.diag.size() / 4; i < g.diag.size(); ++i) {
      const double p = static_cast<double>(g.diag[i].p);
      w = std::max(w, g.order_rho / p * t.log_bracket_width(beta * m.hurst() * p));
    }
    g.type_uncertainty = std::expm1(w);
  }
  return g;
}

/// Growth of t -> E exp(t (L_b - L_a)), targeting (alpha/(alpha-1), (b-a) C).
inline GrowthEstimate lt_mgf_growth(const StableParams& p, double a, double b,
                                    std::size_t p_max = 800) {
  detail::require_interval(a, b, "lt_mgf_growth");
  return valiron_growth(lt_mgf_oracle(p, a, b, p_max), p_max);
}

}  // namespace ltfbm
