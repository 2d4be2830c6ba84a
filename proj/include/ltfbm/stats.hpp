#pragma once

#include <algorithm>
#include <functional>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/QR>

#include "errors.hpp"

namespace ltfbm {

struct MeanSe {
  double mean;
  double se;
  double sd;
  std::size_t n;
};

/// Mean and standard error; summation in index order so the result is reproducible.
inline MeanSe mean_se(const std::vector<double>& x) {
  if (x.size() < 2) throw ArgumentError("mean_se: need at least 2 values");
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  double s2 = 0.0;
  std::size_t k = 0;
  for (double v : x) {
    ++k;
    const double d = v - m;
    m += d / static_cast<double>(k);
    s2 += d * (v - m);
  }
  const double sd = std::sqrt(s2 / (n - 1.0));
  return {m, sd / std::sqrt(n), sd, x.size()};
}

/// Sample covariance of two equally long sequences.
inline double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("covariance: size mismatch");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size() - 1);
}

/// Empirical q-quantile (type 7, linear interpolation), on a copy.
inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw ArgumentError("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

/// Quantile with a standard error from the spread of per-batch quantiles.
inline MeanSe batch_quantile(const std::vector<double>& x, double q, std::size_t batches = 20) {
  if (x.size() < batches * 10) throw ArgumentError("batch_quantile: too few values");
  std::vector<double> qs;
  const std::size_t per = x.size() / batches;
  for (std::size_t b = 0; b < batches; ++b) {
    qs.push_back(quantile(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(b * per),
                                              x.begin() + static_cast<std::ptrdiff_t>((b + 1) * per)),
                          q));
  }
  MeanSe ms = mean_se(qs);
  ms.mean = quantile(x, q);
  return ms;
}

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  double r2;
  double resid_sd;
};

/// Ordinary least squares of y on the columns of X (include a column of ones for an intercept).
inline LinearFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size() || X.rows() <= X.cols()) {
    throw ArgumentError("least_squares: need more rows than columns");
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd r = y - X * beta;
  const double dof = static_cast<double>(X.rows() - X.cols());
  const double s2 = r.squaredNorm() / dof;
  const Eigen::MatrixXd cov = s2 * (X.transpose() * X).inverse();
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  LinearFit f;
  f.coef = beta;
  f.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  f.r2 = sst > 0.0 ? 1.0 - r.squaredNorm() / sst : 1.0;
  f.resid_sd = std::sqrt(s2);
  return f;
}

/// y = c0 + c1 x.
inline LinearFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("line_fit: size mismatch");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = x[static_cast<std::size_t>(i)];
    Y(i) = y[static_cast<std::size_t>(i)];
  }
  return least_squares(X, Y);
}

/// log of (1/n) sum exp(v_i), computed stably.
inline double log_mean_exp(const std::vector<double>& v) {
  if (v.empty()) throw ArgumentError("log_mean_exp: empty sample");
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s / static_cast<double>(v.size()));
}

struct JackknifeEstimate {
  double value;
  double bias;
  double se;
};

/// Delete-a-block jackknife for log_mean_exp: value, bias estimate and standard error.
inline JackknifeEstimate log_mean_exp_jackknife(const std::vector<double>& v,
                                                std::size_t blocks = 50) {
  const std::size_t n = v.size();
  if (n < blocks * 2) throw ArgumentError("log_mean_exp_jackknife: too few values");
  const double mx = *std::max_element(v.begin(), v.end());
  std::vector<double> bs(blocks, 0.0);
  std::vector<std::size_t> bn(blocks, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i * blocks / n;
    bs[b] += std::exp(v[i] - mx);
    ++bn[b];
  }
  const double tot = std::accumulate(bs.begin(), bs.end(), 0.0);
  const double full = mx + std::log(tot / static_cast<double>(n));
  std::vector<double> loo(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double rest = tot - bs[b];
    loo[b] = rest > 0.0 ? mx + std::log(rest / static_cast<double>(n - bn[b]))
                        : -std::numeric_limits<double>::infinity();
  }
  const double g = static_cast<double>(blocks);
  const double lbar = std::accumulate(loo.begin(), loo.end(), 0.0) / g;
  double ss = 0.0;
  for (double l : loo) ss += (l - lbar) * (l - lbar);
  return {full, (g - 1.0) * (lbar - full), std::sqrt((g - 1.0) / g * ss)};
}

/// (sum w)^2 / sum w^2 for weights exp(v_i).
inline double effective_sample_size(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  double s2 = 0.0;
  for (double x : v) {
    const double w = std::exp(x - mx);
    s += w;
    s2 += w * w;
  }
  return s * s / s2;
}

struct SurvivalPoint {
  double x;
  double log_survival;
};

/// Empirical log-survival log(k/n) at the k-th largest value, for survival
/// levels k/n within [s_lo, s_hi].
inline std::vector<SurvivalPoint> log_survival_window(std::vector<double> x, double s_lo,
                                                      double s_hi) {
  if (x.empty()) throw ArgumentError("log_survival_window: empty sample");
  if (!(0.0 < s_lo && s_lo < s_hi && s_hi <= 1.0)) {
    throw ArgumentError("log_survival_window: need 0 < s_lo < s_hi <= 1");
  }
  std::sort(x.begin(), x.end(), std::greater<>());
  const double n = static_cast<double>(x.size());
  std::vector<SurvivalPoint> out;
  for (std::size_t k = 1; k <= x.size(); ++k) {
    const double s = static_cast<double>(k) / n;
    if (s < s_lo) continue;
    if (s > s_hi) break;
    out.push_back({x[k - 1], std::log(s)});
  }
  return out;
}

struct TailExponentFit {
  double exponent;
  double se;
  double rate;            // B in S(x)/S(u) = (x/u)^{-d} exp(-B (x^g - u^g))
  double log_power;       // d
  double threshold;       // u
  std::size_t exceedances;
};

namespace detail {

struct WeibullProfile {
  double loglik;
  double d;
  double b;
};

/// Maximizes the exceedance log-likelihood over (d, B) at fixed exponent g, data y = x/u >= 1.
/// Hazard d/y + B g y^{g-1} is linear in (d, B), so the problem is concave.
inline WeibullProfile weibull_profile(const std::vector<double>& y, double g) {
  const std::size_t n = y.size();
  std::vector<double> ly(n), pw(n);
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ly[i] = std::log(y[i]);
    pw[i] = std::pow(y[i], g);
    s1 += ly[i];
    s2 += pw[i] - 1.0;
  }
  auto loglik = [&](double d, double b) {
    if (!(d + b * g > 0.0) || !(b >= 0.0)) return -std::numeric_limits<double>::infinity();
    double l = -d * s1 - b * s2;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = (d + b * g * pw[i]) / y[i];
      if (!(h > 0.0)) return -std::numeric_limits<double>::infinity();
      l += std::log(h);
    }
    return l;
  };
  double d = 0.0;
  double b = static_cast<double>(n) / s2;
  double cur = loglik(d, b);
  for (int it = 0; it < 100; ++it) {
    double gd = -s1, gb = -s2, hdd = 0.0, hdb = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 1.0 / y[i];
      const double c = g * pw[i] / y[i];
      const double h = d * a + b * c;
      gd += a / h;
      gb += c / h;
      hdd += a * a / (h * h);
      hdb += a * c / (h * h);
      hbb += c * c / (h * h);
    }
    const double det = hdd * hbb - hdb * hdb;
    if (!(det > 0.0)) break;
    // Newton step for the concave objective: delta = H^{-1} grad with H the negated Hessian
    const double sd = (hbb * gd - hdb * gb) / det;
    const double sb = (hdd * gb - hdb * gd) / det;
    double step = 1.0;
    double next = -std::numeric_limits<double>::infinity();
    while (step > 1e-12) {
      next = loglik(d + step * sd, b + step * sb);
      if (next >= cur) break;
      step *= 0.5;
    }
    if (!(next >= cur)) break;
    d += step * sd;
    b += step * sb;
    const double gain = next - cur;
    cur = next;
    if (gain < 1e-12 * (1.0 + std::abs(cur))) break;
  }
  return {cur, d, b};
}

}  // namespace detail

/// Tail exponent g of P{X > x} ~ x^{-d} exp(-B x^g) by maximum likelihood on the
/// exceedances over the `lower_quantile` empirical quantile. The standard error comes
/// from the curvature of the profile log-likelihood in g.
inline TailExponentFit tail_exponent_mle(const std::vector<double>& x, double lower_quantile,
                                         double g_lo = 0.2, double g_hi = 8.0) {
  if (!(lower_quantile > 0.0 && lower_quantile < 1.0)) {
    throw ArgumentError("tail_exponent_mle: lower_quantile must be in (0,1)");
  }
  const double u = quantile(x, lower_quantile);
  if (!(u > 0.0)) throw ArgumentError("tail_exponent_mle: threshold must be positive");
  std::vector<double> y;
  for (double v : x) {
    if (v > u) y.push_back(v / u);
  }
  if (y.size() < 50) throw WindowError("tail_exponent_mle: fewer than 50 exceedances");
  auto prof = [&](double g) { return detail::weibull_profile(y, g).loglik; };
  // coarse scan on a log grid, then golden section around the best point
  const int n_grid = 60;
  double best_g = g_lo;
  double best_l = -std::numeric_limits<double>::infinity();
  const double lr = std::log(g_hi / g_lo);
  for (int k = 0; k <= n_grid; ++k) {
    const double g = g_lo * std::exp(lr * k / n_grid);
    const double l = prof(g);
    if (l > best_l) {
      best_l = l;
      best_g = g;
    }
  }
  const double ratio = std::exp(lr / n_grid);
  double lo = std::max(g_lo, best_g / ratio);
  double hi = std::min(g_hi, best_g * ratio);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo);
  double d = lo + phi * (hi - lo);
  double fc = prof(c);
  double fd = prof(d);
  while (hi - lo > 1e-7 * best_g) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = prof(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = prof(d);
    }
  }
  const double g = 0.5 * (lo + hi);
  const double eps = 1e-3 * g;
  const double curv = (prof(g + eps) - 2.0 * prof(g) + prof(g - eps)) / (eps * eps);
  const detail::WeibullProfile at = detail::weibull_profile(y, g);
  TailExponentFit f;
  f.exponent = g;
  f.se = curv < 0.0 ? 1.0 / std::sqrt(-curv) : std::numeric_limits<double>::infinity();
  f.rate = at.b * std::pow(u, -g);
  f.log_power = at.d;
  f.threshold = u;
  f.exceedances = y.size();
  return f;
}

/// Fixed-exponent log-survival regression log S(x) = c - B x^g over a survival window.
struct TailConstantFit {
  double constant;  // B
  double se;
  double intercept;
  double r2;
  std::size_t points;
};

inline TailConstantFit tail_constant_fit(const std::vector<double>& x, double g, double s_lo,
                                         double s_hi) {
  const std::vector<SurvivalPoint> pts = log_survival_window(x, s_lo, s_hi);
  if (pts.size() < 10) throw WindowError("tail_constant_fit: fewer than 10 points in the window");
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(std::pow(p.x, g));
    ys.push_back(p.log_survival);
  }
  const LinearFit f = line_fit(xs, ys);
  return {-f.coef(1), f.se(1), f.coef(0), f.r2, pts.size()};
}

}  // namespace ltfbm
