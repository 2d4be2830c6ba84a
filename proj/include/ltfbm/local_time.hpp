#pragma once

// Local time at zero of a stable process: a grid estimator from the
// occupation density formula and a first-passage construction from the
// inverse stable subordinator (symmetric case only).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "grid_path.hpp"
#include "model.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "stable.hpp"

namespace ltfbm {

/// Default occupation bandwidth: dt^{1/alpha} times a spread constant.
inline double occupation_epsilon(const StableParams& p, double dt, double spread = 1.0) {
  if (!(spread > 0.0)) throw ArgumentError("occupation_epsilon: spread must be positive");
  return spread * std::pow(dt, 1.0 / p.alpha());
}

/// L_t ~ dt/(2 eps) * #{s <= t : |X_s| <= eps}, counted on the grid of x.
inline GridPath local_time_occupation(const GridPath& x, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("local_time_occupation: epsilon must be positive");
  if (x.monotone()) throw ArgumentError("local_time_occupation: expects a non-monotone path");
  const double w = x.dt() / (2.0 * epsilon);
  std::vector<double> l(x.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) <= epsilon) ++count;
    l[i] = w * static_cast<double>(count);
  }
  return GridPath(x.t0(), x.dt(), std::move(l), true);
}

/// Scale c of the subordinator S with E exp(-s S_u) = exp(-c u s^{1-1/alpha}).
/// c = 1/A1 makes inf{u : S_u > t} reproduce every moment A1^q Gamma(q+1) t^{q(1-1/alpha)}
/// / Gamma(1 + q(1-1/alpha)), the first one in particular.
inline double subordinator_calibration(const StableParams& p) { return 1.0 / a1(p); }

namespace detail {
inline void require_symmetric(const StableParams& p, const char* who) {
  if (p.nu() != 0.0) {
    std::ostringstream os;
    os << who << ": the inverse-subordinator construction is only calibrated for nu = 0 (got nu="
       << p.nu() << "); use the occupation estimator";
    throw ArgumentError(os.str());
  }
}
}  // namespace detail

/// Subordinator step du = E L_dt / refine.
inline double subordinator_step(const StableParams& p, double dt, double refine) {
  if (!(refine >= 1.0)) throw ArgumentError("subordinator_step: refine must be >= 1");
  return lt_moment_exact(p, 1.0, dt) / refine;
}

/// L at sorted nonnegative times from one subordinator trajectory with step du.
/// The first-passage index k gives L in ((k-1) du, k du]; the midpoint is returned.
inline std::vector<double> lt_subordinator_at(const StableParams& p, const std::vector<double>& times,
                                              double du, Rng& rng) {
  detail::require_symmetric(p, "lt_subordinator_at");
  if (!(du > 0.0)) throw ArgumentError("lt_subordinator_at: du must be positive");
  const double b = p.lt_index();
  const double step = std::pow(subordinator_calibration(p) * du, 1.0 / b);
  std::vector<double> out(times.size());
  double s = 0.0;
  std::size_t k = 0;
  double prev_t = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    if (!(t >= prev_t)) throw ArgumentError("lt_subordinator_at: times must be sorted and >= 0");
    prev_t = t;
    if (t == 0.0) {
      out[j] = 0.0;
      continue;
    }
    while (s <= t) {
      s += step * positive_stable(b, rng);
      ++k;
    }
    out[j] = (static_cast<double>(k) - 0.5) * du;
  }
  return out;
}

/// L on {0, dt, ..., n_steps dt}, exactly nondecreasing, L_0 = 0.
inline GridPath local_time_inverse_subordinator(const StableParams& p, double horizon, double dt,
                                                std::uint64_t seed, double refine = 16.0) {
  if (!(horizon > 0.0)) throw ArgumentError("local_time_inverse_subordinator: horizon must be positive");
  if (!(dt > 0.0)) throw ArgumentError("local_time_inverse_subordinator: dt must be positive");
  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> times(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) times[i] = dt * static_cast<double>(i);
  Rng rng(seed);
  return GridPath(0.0, dt, lt_subordinator_at(p, times, subordinator_step(p, dt, refine), rng),
                  true);
}

/// Exact draw of L_t: A1 t^{1-1/alpha} Y^{-(1-1/alpha)} with Y positive stable of index 1-1/alpha.
/// Its moments are those of the Mittag-Leffler law, which they determine, so this
/// holds for every nu.
inline double lt_exact_marginal(const StableParams& p, double t, Rng& rng) {
  const double b = p.lt_index();
  return a1(p) * std::pow(t, b) * std::pow(positive_stable(b, rng), -b);
}

}  // namespace ltfbm
