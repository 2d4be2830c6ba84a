#pragma once

// Monte Carlo campaigns confronting simulated paths with the closed forms in model.hpp.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "local_time.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "stable.hpp"
#include "stats.hpp"

namespace ltfbm {

struct Tolerances {
  double moment_k_se = 3.0;
  double undersampling_rel_se = 0.2;
  double mgf_slope_rel = 0.25;
  double mgf_exponent_rel = 0.15;
  double mgf_symmetry_rms = 2.0;
  double tail_exponent_rel = 0.15;
  double tail_constant_rel = 0.35;
  double max_tail_r2 = 0.98;
  double max_tail_k_se = 3.0;
  double modulus_slope_abs = 0.1;
  double lil_k_se = 3.0;
  double lil_stabilization = 2.0;
  double ldp_slope_rel = 0.25;
};

struct CampaignConfig {
  SimConfig sim;
  Tolerances tol;
};

struct Estimate {
  std::string name;
  double value;
  double se;
};

struct Target {
  std::string name;
  double value;
};

/// pass iff lower <= estimate <= upper.
struct Check {
  std::string name;
  std::string target;  // comma-separated names from CampaignResult::targets
  double estimate;
  double se;
  double lower;
  double upper;
  bool pass;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CampaignResult {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, std::string>> settings;
  std::size_t sample_size = 0;
  std::vector<Estimate> estimates;
  std::vector<Target> targets;
  std::vector<Check> checks;
  ResultTable table;
  std::vector<std::string> warnings;
  double wall_time = 0.0;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  void add_target(const std::string& n, double v) { targets.push_back({n, v}); }

  double target(const std::string& n) const {
    for (const auto& t : targets) {
      if (t.name == n) return t.value;
    }
    throw ArgumentError("CampaignResult: no target named " + n);
  }

  void add_estimate(const std::string& n, double v, double se) { estimates.push_back({n, v, se}); }

  const Estimate& estimate(const std::string& n) const {
    for (const auto& e : estimates) {
      if (e.name == n) return e;
    }
    throw ArgumentError("CampaignResult: no estimate named " + n);
  }

  const Check& check(const std::string& n) const {
    for (const auto& c : checks) {
      if (c.name == n) return c;
    }
    throw ArgumentError("CampaignResult: no check named " + n);
  }

  void add_check(const std::string& n, const std::string& target_names, double est, double se,
                 double lower, double upper) {
    std::stringstream ss(target_names);
    std::string item;
    while (std::getline(ss, item, ',')) target(item);
    checks.push_back({n, target_names, est, se, lower, upper, lower <= est && est <= upper});
  }

  /// |est - target| <= k se.
  void check_se(const std::string& n, const std::string& t, double est, double se, double k) {
    const double v = target(t);
    add_check(n, t, est, se, v - k * se, v + k * se);
  }

  /// |est - target| <= tol |target|.
  void check_relative(const std::string& n, const std::string& t, double est, double se,
                      double tol) {
    const double v = target(t);
    add_check(n, t, est, se, v - tol * std::abs(v), v + tol * std::abs(v));
  }

  void check_absolute(const std::string& n, const std::string& t, double est, double se,
                      double tol) {
    const double v = target(t);
    add_check(n, t, est, se, v - tol, v + tol);
  }
};

namespace detail {

inline std::string label(const std::string& base, double v) {
  std::ostringstream os;
  os << base << "(" << std::setprecision(6) << v << ")";
  return os.str();
}

inline void echo_model(CampaignResult& r, const ModelParams& m) {
  r.params.emplace_back("alpha", m.alpha());
  r.params.emplace_back("nu", m.stable().nu());
  r.params.emplace_back("chi", m.stable().chi());
  r.params.emplace_back("hurst", m.hurst());
}

inline void echo_stable(CampaignResult& r, const StableParams& p) {
  r.params.emplace_back("alpha", p.alpha());
  r.params.emplace_back("nu", p.nu());
  r.params.emplace_back("chi", p.chi());
}

inline void echo_sim(CampaignResult& r, const SimConfig& c) {
  r.params.emplace_back("seed", static_cast<double>(c.seed));
  r.params.emplace_back("dt", c.dt);
  r.params.emplace_back("n_steps", static_cast<double>(c.n_steps));
  r.settings.emplace_back("local_time_method", to_string(c.local_time_method));
  r.settings.emplace_back("w_method", to_string(c.w_method));
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

/// Fills out[i] = fn(rng_i) with rng_i seeded by replicate_seed(master, i).
template <class Fn>
std::vector<double> draw(std::size_t n, std::uint64_t master, unsigned threads, Fn&& fn) {
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(replicate_seed(master, i));
    out[i] = fn(rng);
  });
  return out;
}

/// Draws of L_b - L_a: exact marginal when a = 0, one subordinator trajectory otherwise.
inline std::vector<double> lt_increments(const StableParams& p, double a, double b, std::size_t n,
                                         const SimConfig& cfg, std::uint64_t master) {
  if (a == 0.0) {
    return draw(n, master, cfg.threads, [&](Rng& r) { return lt_exact_marginal(p, b, r); });
  }
  const double du = subordinator_step(p, cfg.dt, cfg.subordinator_refine);
  const std::vector<double> times{a, b};
  return draw(n, master, cfg.threads, [&](Rng& r) {
    const std::vector<double> l = lt_subordinator_at(p, times, du, r);
    return l[1] - l[0];
  });
}

/// max over windows of w+1 consecutive points of (max - min), by monotone deques.
inline double sup_oscillation(const std::vector<double>& z, std::size_t w) {
  std::deque<std::size_t> hi;
  std::deque<std::size_t> lo;
  double best = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    while (!hi.empty() && z[hi.back()] <= z[i]) hi.pop_back();
    hi.push_back(i);
    while (!lo.empty() && z[lo.back()] >= z[i]) lo.pop_back();
    lo.push_back(i);
    if (hi.front() + w < i) hi.pop_front();
    if (lo.front() + w < i) lo.pop_front();
    if (i >= w) best = std::max(best, z[hi.front()] - z[lo.front()]);
  }
  return best;
}

/// log(#{x_i > v}/n) at each v; WindowError when the largest v has fewer than min_count exceedances.
inline std::vector<double> log_exceedance(const std::vector<double>& sorted_x,
                                          const std::vector<double>& grid, std::size_t min_count) {
  std::vector<double> out;
  const double n = static_cast<double>(sorted_x.size());
  for (double v : grid) {
    const auto it = std::upper_bound(sorted_x.begin(), sorted_x.end(), v);
    const auto c = static_cast<std::size_t>(sorted_x.end() - it);
    if (c < min_count) {
      std::ostringstream os;
      os << "window too narrow: " << c << " exceedances at x=" << v << " (need " << min_count << ")";
      throw WindowError(os.str());
    }
    out.push_back(std::log(static_cast<double>(c) / n));
  }
  return out;
}

/// Thresholds at geometric survival levels from s_hi down to s_lo.
inline std::vector<double> survival_grid(const std::vector<double>& sorted_x, double s_hi,
                                         double s_lo, std::size_t points) {
  std::vector<double> g;
  for (std::size_t k = 0; k < points; ++k) {
    const double s = s_hi * std::pow(s_lo / s_hi, static_cast<double>(k) / static_cast<double>(points - 1));
    g.push_back(quantile(sorted_x, 1.0 - s));
  }
  return g;
}

inline std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::log(x));
  return out;
}

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();
inline constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace detail

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// E|L_b - L_a|^n and E|Z(b) - Z(a)|^{n/H} against the exact values (a = 0) or the sandwich.
inline CampaignResult verify_moments(const ModelParams& m, double a, double b,
                                     const std::vector<int>& orders, std::size_t reps,
                                     const CampaignConfig& cc) {
  detail::Stopwatch sw;
  if (!(a >= 0.0 && b > a)) throw ArgumentError("verify_moments: need 0 <= a < b");
  if (orders.empty()) throw ArgumentError("verify_moments: orders must be nonempty");
  for (int n : orders) {
    if (n < 1 || n > 6) throw ArgumentError("verify_moments: orders must lie in 1..6");
  }
  if (reps < 10000) throw ArgumentError("verify_moments: reps must be >= 10000");
  if (cc.sim.horizon() < b * (1.0 - 1e-12)) {
    throw ArgumentError("verify_moments: n_steps * dt must cover b");
  }
  CampaignResult r;
  r.name = "moments";
  detail::echo_model(r, m);
  r.params.emplace_back("a", a);
  r.params.emplace_back("b", b);
  detail::echo_sim(r, cc.sim);
  r.sample_size = reps;

  const LZSample s = sample_lz(m, {a, b}, reps, cc.sim);
  std::vector<double> dl(reps), dz(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    dl[i] = s.l(k, 1) - s.l(k, 0);
    dz[i] = std::abs(s.z(k, 1) - s.z(k, 0));
  }
  const double h = m.hurst();
  const double k_se = cc.tol.moment_k_se;
  r.table.columns = {"process", "order", "estimate", "se", "target", "lower", "upper"};
  for (int n : orders) {
    const double nd = static_cast<double>(n);
    for (int proc = 0; proc < 2; ++proc) {
      const std::string who = proc == 0 ? "lt" : "z";
      std::vector<double> v(reps);
      for (std::size_t i = 0; i < reps; ++i) {
        v[i] = proc == 0 ? std::pow(dl[i], nd) : std::pow(dz[i], nd / h);
      }
      const MeanSe ms = mean_se(v);
      const std::string en = who + "_moment_" + std::to_string(n);
      r.add_estimate(en, ms.mean, ms.se);
      if (ms.se > cc.tol.undersampling_rel_se * std::abs(ms.mean)) {
        std::ostringstream os;
        os << en << ": undersampled (se/estimate > " << cc.tol.undersampling_rel_se << ")";
        r.warnings.push_back(os.str());
      }
      double target = detail::nan;
      double lower = detail::nan;
      double upper = detail::nan;
      if (a == 0.0) {
        target = proc == 0 ? lt_moment_exact(m.stable(), nd, b) : z_moment_exact(m, n, b);
        const std::string tn = who + "_moment_exact_" + std::to_string(n);
        r.add_target(tn, target);
        r.check_se(en, tn, ms.mean, ms.se, k_se);
      } else {
        const MomentBounds mb =
            proc == 0 ? lt_moment_bounds(m.stable(), n, a, b) : z_moment_bounds(m, n, a, b);
        lower = mb.lower;
        upper = mb.upper;
        const std::string tl = who + "_moment_lower_" + std::to_string(n);
        const std::string tu = who + "_moment_upper_" + std::to_string(n);
        r.add_target(tl, lower);
        r.add_target(tu, upper);
        r.add_check(en + "_sandwich", tl + "," + tu, ms.mean, ms.se, lower - k_se * ms.se,
                    upper + k_se * ms.se);
        const double lt_int = lt_moment_interval(m.stable(), n, a, b);
        target = proc == 0 ? lt_int : fbm_abs_moment(nd / h) * lt_int;
        const std::string tn = who + "_moment_interval_" + std::to_string(n);
        r.add_target(tn, target);
        r.check_se(en + "_interval", tn, ms.mean, ms.se, k_se);
      }
      r.table.rows.push_back({static_cast<double>(proc), nd, ms.mean, ms.se, target, lower, upper});
    }
  }
  r.wall_time = sw.seconds();
  return r;
}

/// E L_b from the occupation estimator and from the inverse subordinator, each against
/// the exact value, and against each other.
inline CampaignResult verify_lt_estimators(const StableParams& p, double b, std::size_t reps,
                                           std::size_t occupation_steps, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  if (!(b > 0.0)) throw ArgumentError("verify_lt_estimators: need b > 0");
  if (reps < 1000) throw ArgumentError("verify_lt_estimators: reps must be >= 1000");
  if (occupation_steps < 16) throw ArgumentError("verify_lt_estimators: occupation_steps too small");
  CampaignResult r;
  r.name = "lt-estimators";
  detail::echo_stable(r, p);
  r.params.emplace_back("b", b);
  r.params.emplace_back("seed", static_cast<double>(cc.sim.seed));
  r.params.emplace_back("occupation_steps", static_cast<double>(occupation_steps));
  r.params.emplace_back("subordinator_dt", cc.sim.dt);
  r.params.emplace_back("subordinator_refine", cc.sim.subordinator_refine);
  r.params.emplace_back("epsilon_spread", cc.sim.epsilon_spread);
  r.sample_size = reps;

  const double du = subordinator_step(p, cc.sim.dt, cc.sim.subordinator_refine);
  const std::vector<double> sub = detail::draw(reps, mix(cc.sim.seed, 0), cc.sim.threads, [&](Rng& g) {
    return lt_subordinator_at(p, {b}, du, g)[0];
  });
  const double dt = b / static_cast<double>(occupation_steps);
  const double eps = occupation_epsilon(p, dt, cc.sim.epsilon_spread);
  std::vector<double> occ(reps);
  parallel_for(reps, cc.sim.threads, [&](std::size_t i) {
    const GridPath x = stable_path(p, dt, occupation_steps, replicate_seed(mix(cc.sim.seed, 1), i));
    occ[i] = local_time_occupation(x, eps).values().back();
  });
  const MeanSe ms_sub = mean_se(sub);
  const MeanSe ms_occ = mean_se(occ);
  const double k = cc.tol.moment_k_se;
  r.add_target("lt_moment_exact_1", lt_moment_exact(p, 1.0, b));
  r.add_estimate("inverse_subordinator_mean", ms_sub.mean, ms_sub.se);
  r.add_estimate("occupation_mean", ms_occ.mean, ms_occ.se);
  r.check_se("inverse_subordinator_mean", "lt_moment_exact_1", ms_sub.mean, ms_sub.se, k);
  r.check_se("occupation_mean", "lt_moment_exact_1", ms_occ.mean, ms_occ.se, k);
  const double diff = ms_occ.mean - ms_sub.mean;
  const double se = std::hypot(ms_sub.se, ms_occ.se);
  r.add_target("estimator_difference", 0.0);
  r.add_estimate("estimator_difference", diff, se);
  r.check_se("estimator_agreement", "estimator_difference", diff, se, k);
  r.table.columns = {"method", "mean", "se", "target"};
  r.table.rows = {{0.0, ms_sub.mean, ms_sub.se, r.target("lt_moment_exact_1")},
                  {1.0, ms_occ.mean, ms_occ.se, r.target("lt_moment_exact_1")}};
  r.wall_time = sw.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Exponential moments
// ---------------------------------------------------------------------------

/// log E exp(theta Z(t)) over a (theta, t) grid. The regression estimator conditions on
/// L: E[exp(theta Z(t)) | L_t] = exp(theta^2 L_t^{2H} / 2). The plain estimator on the
/// same draws feeds the theta <-> -theta symmetry check.
inline CampaignResult verify_mgf(const ModelParams& m, const std::vector<double>& thetas,
                                 const std::vector<double>& ts, std::size_t reps,
                                 const CampaignConfig& cc) {
  detail::Stopwatch sw;
  if (!m.ldp_valid()) throw DomainError("verify_mgf: requires 2H < alpha");
  if (thetas.size() < 3) throw ArgumentError("verify_mgf: need at least 3 theta values");
  if (ts.size() < 3) throw ArgumentError("verify_mgf: need at least 3 t values");
  for (double th : thetas) {
    if (!(th > 0.0)) throw ArgumentError("verify_mgf: theta values must be positive");
  }
  for (double t : ts) {
    if (!(t > 0.0)) throw ArgumentError("verify_mgf: t values must be positive");
  }
  if (reps < 1000) throw ArgumentError("verify_mgf: reps must be >= 1000");
  CampaignResult r;
  r.name = "mgf";
  detail::echo_model(r, m);
  r.params.emplace_back("seed", static_cast<double>(cc.sim.seed));
  r.settings.emplace_back("estimator", "conditional_on_local_time");
  r.sample_size = reps * ts.size();

  const double h = m.hurst();
  const double rho = m.mgf_exponent();
  const double gam = m.ldp_time_exponent();
  const double b1 = growth_constant_b1(m);
  r.add_target("mgf_exponent", rho);
  r.add_target("mgf_symmetry_difference", 0.0);

  const std::size_t nt = ts.size();
  const std::size_t nth = thetas.size();
  // cond[j][k], se_cond[j][k] for theta j and time k
  std::vector<std::vector<double>> cond(nth, std::vector<double>(nt));
  std::vector<std::vector<double>> cond_se(nth, std::vector<double>(nt));
  std::vector<double> sym_z;
  r.table.columns = {"theta", "t", "t_gamma", "log_mgf", "se", "jackknife_bias", "log_mgf_direct",
                     "se_direct", "log_mgf_direct_neg", "se_direct_neg", "ess"};
  for (std::size_t k = 0; k < nt; ++k) {
    const std::uint64_t master = mix(cc.sim.seed, k);
    std::vector<double> lpow(reps);
    std::vector<double> z(reps);
    parallel_for(reps, cc.sim.threads, [&](std::size_t i) {
      Rng g(replicate_seed(master, i));
      const double l = lt_exact_marginal(m.stable(), ts[k], g);
      lpow[i] = std::pow(l, 2.0 * h);
      z[i] = std::sqrt(lpow[i]) * g.normal();
    });
    for (std::size_t j = 0; j < nth; ++j) {
      const double th = thetas[j];
      std::vector<double> vc(reps), vp(reps), vn(reps);
      for (std::size_t i = 0; i < reps; ++i) {
        vc[i] = 0.5 * th * th * lpow[i];
        vp[i] = th * z[i];
        vn[i] = -th * z[i];
      }
      const JackknifeEstimate jc = log_mean_exp_jackknife(vc);
      const JackknifeEstimate jp = log_mean_exp_jackknife(vp);
      const JackknifeEstimate jn = log_mean_exp_jackknife(vn);
      const double ess = effective_sample_size(vc);
      if (ess < 10.0) {
        r.warnings.push_back(detail::label("log_mgf dominated by fewer than 10 draws at theta", th) +
                             detail::label(" t", ts[k]));
      }
      cond[j][k] = jc.value;
      cond_se[j][k] = jc.se;
      const double jse = std::hypot(jp.se, jn.se);
      sym_z.push_back(jse > 0.0 ? (jp.value - jn.value) / jse : 0.0);
      r.table.rows.push_back({th, ts[k], std::pow(ts[k], gam), jc.value, jc.se, jc.bias, jp.value,
                              jp.se, jn.value, jn.se, ess});
    }
  }
  std::vector<double> tg;
  for (double t : ts) tg.push_back(std::pow(t, gam));
  std::vector<double> log_th, log_slope;
  for (std::size_t j = 0; j < nth; ++j) {
    const LinearFit f = line_fit(tg, cond[j]);
    const double slope = f.coef(1);
    const std::string tn = detail::label("lambda1", thetas[j]);
    r.add_target(tn, b1 * std::pow(thetas[j], rho));
    r.add_estimate(detail::label("lambda1_slope", thetas[j]), slope, f.se(1));
    r.check_relative(detail::label("lambda1_slope", thetas[j]), tn, slope, f.se(1),
                     cc.tol.mgf_slope_rel);
    if (slope > 0.0) {
      log_th.push_back(std::log(thetas[j]));
      log_slope.push_back(std::log(slope));
    }
  }
  if (log_th.size() >= 3) {
    const LinearFit f = line_fit(log_th, log_slope);
    r.add_estimate("mgf_exponent", f.coef(1), f.se(1));
    r.check_relative("mgf_exponent", "mgf_exponent", f.coef(1), f.se(1), cc.tol.mgf_exponent_rel);
  } else {
    r.warnings.push_back("mgf_exponent: fewer than 3 positive slopes");
    r.add_check("mgf_exponent", "mgf_exponent", detail::nan, detail::nan, 0.0, 0.0);
  }
  double ss = 0.0;
  for (double v : sym_z) ss += v * v;
  const double rms = std::sqrt(ss / static_cast<double>(sym_z.size()));
  r.add_estimate("mgf_symmetry_rms_z", rms, 0.0);
  r.add_check("mgf_symmetry", "mgf_symmetry_difference", rms, 0.0, 0.0, cc.tol.mgf_symmetry_rms);
  r.wall_time = sw.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Tails
// ---------------------------------------------------------------------------

/// Free-exponent fit on the exceedances above the mle_quantile; fixed-exponent
/// constant by log-survival regression for survival levels in [1 - fit_hi, 1 - fit_lo].
struct TailWindow {
  double mle_quantile = 0.8;
  double fit_lo = 0.9;
  double fit_hi = 0.9999;

  void validate() const {
    if (!(0.0 < mle_quantile && mle_quantile < 1.0)) {
      throw ArgumentError("TailWindow: mle_quantile must be in (0,1)");
    }
    if (!(0.0 < fit_lo && fit_lo < fit_hi && fit_hi < 1.0)) {
      throw ArgumentError("TailWindow: need 0 < fit_lo < fit_hi < 1");
    }
  }
};

namespace detail {

inline void tail_fits(CampaignResult& r, const std::vector<double>& x, double exponent_target,
                      double constant_target, const TailWindow& w, const Tolerances& tol) {
  w.validate();
  const double top = static_cast<double>(x.size()) * (1.0 - w.fit_hi);
  if (top < 50.0) {
    std::ostringstream os;
    os << r.name << ": window too narrow, " << top << " exceedances at the top threshold (need 50)";
    throw WindowError(os.str());
  }
  r.params.emplace_back("mle_quantile", w.mle_quantile);
  r.params.emplace_back("fit_lo", w.fit_lo);
  r.params.emplace_back("fit_hi", w.fit_hi);
  r.add_target("tail_exponent", exponent_target);
  r.add_target("tail_constant", constant_target);
  const TailExponentFit fe = tail_exponent_mle(x, w.mle_quantile);
  r.add_estimate("tail_exponent", fe.exponent, fe.se);
  r.add_estimate("tail_log_power", fe.log_power, detail::nan);
  r.check_relative("tail_exponent", "tail_exponent", fe.exponent, fe.se, tol.tail_exponent_rel);
  const TailConstantFit fc = tail_constant_fit(x, exponent_target, 1.0 - w.fit_hi, 1.0 - w.fit_lo);
  r.add_estimate("tail_constant", fc.constant, fc.se);
  r.add_estimate("tail_constant_r2", fc.r2, 0.0);
  r.check_relative("tail_constant", "tail_constant", fc.constant, fc.se, tol.tail_constant_rel);

  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<double> grid = survival_grid(sorted, 1.0 - w.fit_lo, 1.0 - w.fit_hi, 25);
  const std::vector<double> ls = log_exceedance(sorted, grid, 1);
  r.table.columns = {"x", "x_pow", "log_survival", "fit_constant", "fit_exponent"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r.table.rows.push_back({grid[i], std::pow(grid[i], exponent_target), ls[i],
                            fc.intercept - fc.constant * std::pow(grid[i], exponent_target),
                            std::log(1.0 - w.mle_quantile) -
                                fe.log_power * std::log(grid[i] / fe.threshold) -
                                fe.rate * (std::pow(grid[i], fe.exponent) -
                                           std::pow(fe.threshold, fe.exponent))});
  }
}

}  // namespace detail

/// Upper tail of |Z(b) - Z(a)| against exponent 2 alpha/(alpha + 2H) and constant B2(a, b).
inline CampaignResult verify_tail(const ModelParams& m, double a, double b, std::size_t reps,
                                  const TailWindow& window, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  detail::require_interval(a, b, "verify_tail");
  if (!(b > a)) throw ArgumentError("verify_tail: need a < b");
  CampaignResult r;
  r.name = "tail";
  detail::echo_model(r, m);
  r.params.emplace_back("a", a);
  r.params.emplace_back("b", b);
  r.params.emplace_back("seed", static_cast<double>(cc.sim.seed));
  r.settings.emplace_back("sampler", a == 0.0 ? "exact_marginal" : "inverse_subordinator");
  r.sample_size = reps;
  // W has stationary increments, so Z(b) - Z(a) = (L_b - L_a)^H N in law
  std::vector<double> x = detail::lt_increments(m.stable(), a, b, reps, cc.sim, mix(cc.sim.seed, 0));
  const std::uint64_t wseed = mix(cc.sim.seed, 1);
  for (std::size_t i = 0; i < reps; ++i) {
    Rng g(replicate_seed(wseed, i));
    x[i] = std::abs(std::pow(x[i], m.hurst()) * g.normal());
  }
  detail::tail_fits(r, x, m.tail_exponent(), tail_constant_b2(m, a, b), window, cc.tol);
  r.wall_time = sw.seconds();
  return r;
}

/// Upper tail of L_b - L_a against exponent alpha and the local-time tail constant.
inline CampaignResult verify_lt_tail(const StableParams& p, double a, double b, std::size_t reps,
                                     const TailWindow& window, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  detail::require_interval(a, b, "verify_lt_tail");
  if (!(b > a)) throw ArgumentError("verify_lt_tail: need a < b");
  CampaignResult r;
  r.name = "lt-tail";
  detail::echo_stable(r, p);
  r.params.emplace_back("a", a);
  r.params.emplace_back("b", b);
  r.params.emplace_back("seed", static_cast<double>(cc.sim.seed));
  r.settings.emplace_back("sampler", a == 0.0 ? "exact_marginal" : "inverse_subordinator");
  r.sample_size = reps;
  const std::vector<double> x = detail::lt_increments(p, a, b, reps, cc.sim, mix(cc.sim.seed, 2));
  detail::tail_fits(r, x, p.alpha(), lt_tail_constant(p, a, b), window, cc.tol);
  r.wall_time = sw.seconds();
  return r;
}

/// g(i, j) + g(j+1, k) <= 2^{1-r} g(i, k) for g(i, j) = (j - i + 1)^r over 1 <= i <= j < k <= n.
inline std::size_t quasi_superadditivity_violations(double r, int n = 64) {
  const double q = std::pow(2.0, 1.0 - r);
  std::size_t bad = 0;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        const double lhs = std::pow(j - i + 1, r) + std::pow(k - j, r);
        if (lhs > q * std::pow(k - i + 1, r) * (1.0 + 1e-14)) ++bad;
      }
    }
  }
  return bad;
}

/// log P{max_{[a,b]} |Z(t) - Z(a)| > x} regressed on x^{2 alpha/(alpha+2H)} / (b-a)^{2H(alpha-1)/(alpha+2H)}.
/// An empty x_grid means 16 thresholds at survival levels from 1e-1 down to 5e-4.
inline CampaignResult verify_max_tail(const ModelParams& m, double a, double b, std::size_t reps,
                                      std::vector<double> x_grid, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  detail::require_interval(a, b, "verify_max_tail");
  if (!(b > a)) throw ArgumentError("verify_max_tail: need a < b");
  if (reps < 100000) throw ArgumentError("verify_max_tail: needs at least 1e5 paths");
  if (cc.sim.horizon() < b * (1.0 - 1e-12)) {
    throw ArgumentError("verify_max_tail: n_steps * dt must cover b");
  }
  CampaignResult r;
  r.name = "max-tail";
  detail::echo_model(r, m);
  r.params.emplace_back("a", a);
  r.params.emplace_back("b", b);
  detail::echo_sim(r, cc.sim);
  r.sample_size = reps;

  const SimConfig& sc = cc.sim;
  const auto ia = static_cast<std::size_t>(std::llround(a / sc.dt));
  const auto ib = static_cast<std::size_t>(std::llround(b / sc.dt));
  std::vector<double> mx(reps), inc(reps);
  FbmCache cache(m.hurst(), fbm_grid_step(m.stable(), sc));
  parallel_for(reps, sc.threads, [&](std::size_t i) {
    const ZPath zp = z_path(m, sc, replicate_seed(sc.seed, i), cache);
    const std::vector<double>& z = zp.z.values();
    double best = 0.0;
    for (std::size_t k = ia; k <= ib; ++k) best = std::max(best, std::abs(z[k] - z[ia]));
    mx[i] = best;
    inc[i] = std::abs(z[ib] - z[ia]);
  });

  const double kappa = m.tail_exponent();
  const double r_exp = m.interval_exponent();
  const double scale = std::pow(b - a, r_exp);
  r.add_target("max_tail_exponent", kappa);
  r.add_target("quasi_superadditivity_index", r_exp);
  r.add_target("quasi_superadditivity_constant", std::pow(2.0, 1.0 - r_exp));

  std::vector<double> smx = mx;
  std::vector<double> sinc = inc;
  std::sort(smx.begin(), smx.end());
  std::sort(sinc.begin(), sinc.end());
  if (x_grid.empty()) x_grid = detail::survival_grid(smx, 1e-1, 5e-4, 16);
  std::sort(x_grid.begin(), x_grid.end());
  const std::vector<double> lmx = detail::log_exceedance(smx, x_grid, 50);
  std::vector<double> reg;
  for (double x : x_grid) reg.push_back(std::pow(x, kappa) / scale);
  const LinearFit fm = line_fit(reg, lmx);

  const std::vector<double> inc_grid = detail::survival_grid(sinc, 1e-1, 5e-4, 16);
  const std::vector<double> linc = detail::log_exceedance(sinc, inc_grid, 50);
  std::vector<double> reg_inc;
  for (double x : inc_grid) reg_inc.push_back(std::pow(x, kappa) / scale);
  const LinearFit fi = line_fit(reg_inc, linc);

  r.add_estimate("max_tail_slope", fm.coef(1), fm.se(1));
  r.add_estimate("max_tail_r2", fm.r2, 0.0);
  r.add_estimate("increment_tail_slope", fi.coef(1), fi.se(1));
  r.add_estimate("a8_analogue", -fm.coef(1), fm.se(1));
  r.add_check("max_tail_linearity", "max_tail_exponent", fm.r2, 0.0, cc.tol.max_tail_r2, 1.0);
  r.add_check("max_tail_slope_negative", "max_tail_exponent", fm.coef(1), fm.se(1), -detail::inf,
              0.0);
  // max dominates the increment pathwise, so its tail decays no faster
  const double dse = std::hypot(fm.se(1), fi.se(1));
  const double excess = std::abs(fm.coef(1)) - std::abs(fi.coef(1));
  r.add_check("max_dominates_increment", "max_tail_exponent", excess, dse, -detail::inf,
              cc.tol.max_tail_k_se * dse);
  const auto bad = static_cast<double>(quasi_superadditivity_violations(r_exp));
  r.add_estimate("quasi_superadditivity_violations", bad, 0.0);
  r.add_check("quasi_superadditivity", "quasi_superadditivity_index,quasi_superadditivity_constant",
              bad, 0.0, 0.0, 0.0);

  r.table.columns = {"x", "regressor", "log_survival", "fit"};
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    r.table.rows.push_back({x_grid[i], reg[i], lmx[i], fm.coef(0) + fm.coef(1) * reg[i]});
  }
  r.wall_time = sw.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Path regularity
// ---------------------------------------------------------------------------

/// sup_{t} sup_{0<=s<=h} |Z(t+s) - Z(t)| on [0, n_steps dt] for each h, per path.
inline CampaignResult verify_modulus(const ModelParams& m, std::vector<double> h_grid,
                                     std::size_t paths, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  const SimConfig& sc = cc.sim;
  if (h_grid.size() < 3) throw ArgumentError("verify_modulus: need at least 3 h values");
  if (paths < 10) throw ArgumentError("verify_modulus: need at least 10 paths");
  std::sort(h_grid.begin(), h_grid.end());
  if (!(h_grid.front() > 0.0)) throw ArgumentError("verify_modulus: h must be positive");
  if (sc.dt > h_grid.front() / 64.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "verify_modulus: resolution too coarse, dt=" << sc.dt << " > min(h)/64=" << h_grid.front() / 64.0;
    throw ArgumentError(os.str());
  }
  if (!(h_grid.back() < sc.horizon())) throw ArgumentError("verify_modulus: h must be below the horizon");
  CampaignResult r;
  r.name = "modulus";
  detail::echo_model(r, m);
  detail::echo_sim(r, sc);
  r.sample_size = paths;

  const double idx = m.selfsim_index();
  const double pw = m.log_power();
  r.add_target("modulus_exponent", idx);
  r.add_target("modulus_log_power", pw);
  std::vector<std::size_t> w;
  for (double h : h_grid) w.push_back(static_cast<std::size_t>(std::llround(h / sc.dt)));
  const std::size_t nh = h_grid.size();
  std::vector<double> sup(paths * nh);
  FbmCache cache(m.hurst(), fbm_grid_step(m.stable(), sc));
  parallel_for(paths, sc.threads, [&](std::size_t i) {
    const ZPath zp = z_path(m, sc, replicate_seed(sc.seed, i), cache);
    for (std::size_t j = 0; j < nh; ++j) sup[i * nh + j] = detail::sup_oscillation(zp.z.values(), w[j]);
  });

  std::vector<double> lh, lmean, lcorr, ratio;
  std::vector<double> path_max_ratio(paths, 0.0);
  r.table.columns = {"h", "window_steps", "mean_sup", "se", "ratio"};
  for (std::size_t j = 0; j < nh; ++j) {
    const double h = static_cast<double>(w[j]) * sc.dt;
    const double norm = std::pow(h, idx) * std::pow(std::log(1.0 / h), pw);
    std::vector<double> v(paths);
    for (std::size_t i = 0; i < paths; ++i) {
      v[i] = sup[i * nh + j];
      path_max_ratio[i] = std::max(path_max_ratio[i], v[i] / norm);
    }
    const MeanSe ms = mean_se(v);
    lh.push_back(std::log(h));
    lmean.push_back(std::log(ms.mean));
    lcorr.push_back(std::log(ms.mean) - pw * std::log(std::log(1.0 / h)));
    ratio.push_back(ms.mean / norm);
    r.table.rows.push_back({h, static_cast<double>(w[j]), ms.mean, ms.se, ms.mean / norm});
  }
  const LinearFit raw = line_fit(lh, lmean);
  const LinearFit corr = line_fit(lh, lcorr);
  r.add_estimate("modulus_slope", raw.coef(1), raw.se(1));
  r.add_estimate("modulus_slope_log_corrected", corr.coef(1), corr.se(1));
  r.check_absolute("modulus_slope", "modulus_exponent", raw.coef(1), raw.se(1),
                   cc.tol.modulus_slope_abs);
  const double rmax = *std::max_element(ratio.begin(), ratio.end());
  const double rmin = *std::min_element(ratio.begin(), ratio.end());
  r.add_estimate("ratio_max", rmax, 0.0);
  r.add_estimate("ratio_min", rmin, 0.0);
  r.add_estimate("path_max_ratio_q99", quantile(path_max_ratio, 0.99), 0.0);
  r.add_check("ratio_positive_finite", "modulus_exponent,modulus_log_power", rmin, 0.0,
              std::numeric_limits<double>::min(), detail::inf);
  // trend of the ratio as h decreases over the three smallest h
  std::vector<double> tx, ty;
  for (std::size_t j = 0; j < 3; ++j) {
    tx.push_back(-lh[j]);
    ty.push_back(std::log(ratio[j]));
  }
  const LinearFit tr = line_fit(tx, ty);
  r.add_estimate("ratio_trend_small_h", tr.coef(1), tr.se(1));
  r.add_check("ratio_bounded", "modulus_exponent,modulus_log_power", tr.coef(1), tr.se(1),
              -detail::inf, 0.0);
  r.wall_time = sw.seconds();
  return r;
}

enum class LilMode { global, local };

inline const char* to_string(LilMode m) { return m == LilMode::global ? "global" : "local"; }

struct LilOptions {
  LilMode mode = LilMode::global;
  double center = 0.0;  // local mode only
  std::optional<double> a8;
};

/// Global: max_{s<=t}|Z(s)| / (t^{H(alpha-1)/alpha} (log log t)^{(alpha+2H)/(2alpha)}) on a t grid.
/// Local: max_{|s|<=h}|Z(c+s) - Z(c)| / (h^{H(alpha-1)/alpha} (log log 1/h)^{...}) on an h grid.
/// The path uses cc.sim.dt and is as long as the grid requires.
inline CampaignResult verify_lil(const ModelParams& m, std::vector<double> grid, std::size_t paths,
                                 const LilOptions& opt, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  if (grid.size() < 4) throw ArgumentError("verify_lil: need at least 4 grid points");
  if (paths < 200) throw ArgumentError("verify_lil: need at least 200 paths");
  std::sort(grid.begin(), grid.end());
  if (!(grid.front() > 0.0)) throw ArgumentError("verify_lil: grid must be positive");
  if (grid.back() / grid.front() < 1000.0 * (1.0 - 1e-12)) {
    throw ArgumentError("verify_lil: grid too short (< 3 decades)");
  }
  const bool global = opt.mode == LilMode::global;
  if (global && !(grid.front() > std::numbers::e)) {
    throw ArgumentError("verify_lil: global grid must start above e");
  }
  if (!global && !(grid.back() < 1.0 / std::numbers::e)) {
    throw ArgumentError("verify_lil: local grid must stay below 1/e");
  }
  if (!global && !(opt.center >= 0.0)) throw ArgumentError("verify_lil: center must be >= 0");
  SimConfig sc = cc.sim;
  const double span = global ? grid.back() : opt.center + grid.back();
  sc.n_steps = static_cast<std::size_t>(std::ceil(span / sc.dt - 1e-9));
  if (grid.front() < 8.0 * sc.dt) throw ArgumentError("verify_lil: dt too coarse for the grid");

  CampaignResult r;
  r.name = global ? "lil-global" : "lil-local";
  detail::echo_model(r, m);
  detail::echo_sim(r, sc);
  r.settings.emplace_back("mode", to_string(opt.mode));
  if (!global) r.params.emplace_back("center", opt.center);
  r.sample_size = paths;
  const double idx = m.selfsim_index();
  const double pw = m.log_power();
  r.add_target("lil_exponent", idx);
  r.add_target("lil_log_power", pw);

  const std::size_t ng = grid.size();
  std::vector<double> stat(paths * ng);
  const auto ic = static_cast<std::size_t>(std::llround(opt.center / sc.dt));
  FbmCache cache(m.hurst(), fbm_grid_step(m.stable(), sc));
  parallel_for(paths, sc.threads, [&](std::size_t i) {
    const ZPath zp = z_path(m, sc, replicate_seed(sc.seed, i), cache);
    const std::vector<double>& z = zp.z.values();
    for (std::size_t j = 0; j < ng; ++j) {
      const double g = grid[j];
      const auto k = static_cast<std::size_t>(std::llround(g / sc.dt));
      double best = 0.0;
      if (global) {
        for (std::size_t s = 0; s <= std::min(k, z.size() - 1); ++s) best = std::max(best, std::abs(z[s]));
      } else {
        const std::size_t lo = ic >= k ? ic - k : 0;
        const std::size_t hi = std::min(ic + k, z.size() - 1);
        for (std::size_t s = lo; s <= hi; ++s) best = std::max(best, std::abs(z[s] - z[ic]));
      }
      const double x = global ? g : 1.0 / g;
      stat[i * ng + j] = best / (std::pow(g, idx) * std::pow(std::log(std::log(x)), pw));
    }
  });

  // grid order from the inner end to the outer end of the limit
  std::vector<std::size_t> order(ng);
  for (std::size_t j = 0; j < ng; ++j) order[j] = global ? j : ng - 1 - j;
  std::vector<double> q50(ng), q99(ng), q99se(ng);
  r.table.columns = {"grid", "q50", "q50_se", "q90", "q99", "q99_se"};
  for (std::size_t j = 0; j < ng; ++j) {
    std::vector<double> v(paths);
    for (std::size_t i = 0; i < paths; ++i) v[i] = stat[i * ng + j];
    const MeanSe m50 = batch_quantile(v, 0.5);
    const MeanSe m99 = batch_quantile(v, 0.99);
    q50[j] = m50.mean;
    q99[j] = m99.mean;
    q99se[j] = m99.se;
    r.table.rows.push_back({grid[j], m50.mean, m50.se, quantile(v, 0.9), m99.mean, m99.se});
  }
  const double smin = *std::min_element(stat.begin(), stat.end());
  r.add_estimate("statistic_min", smin, 0.0);
  r.add_check("statistic_nonnegative", "lil_exponent,lil_log_power", smin, 0.0, 0.0, detail::inf);
  const double q99max = *std::max_element(q99.begin(), q99.end());
  r.add_estimate("q99_max", q99max, 0.0);
  r.add_check("q99_bounded", "lil_exponent,lil_log_power", q99max, 0.0, 0.0,
              std::numeric_limits<double>::max());

  // outermost decade: last grid point in limit order against the point one decade inward
  const std::size_t end = order[ng - 1];
  const double g_end = grid[end];
  const double g_start = global ? g_end / 10.0 : g_end * 10.0;
  std::size_t start = order[0];
  for (std::size_t j = 0; j < ng; ++j) {
    if (std::abs(std::log(grid[j] / g_start)) < std::abs(std::log(grid[start] / g_start))) start = j;
  }
  const double trend = q99[end] / q99[start];
  const double trend_se = trend * std::hypot(q99se[end] / q99[end], q99se[start] / q99[start]);
  r.add_estimate("q99_outer_decade_ratio", trend, trend_se);
  r.add_check("q99_non_trending", "lil_exponent,lil_log_power", trend, trend_se, 0.0,
              1.0 + cc.tol.lil_k_se * trend_se);

  // pooled medians of the first and last decade in limit order
  auto pooled_median = [&](bool first) {
    const double g0 = grid[order[first ? 0 : ng - 1]];
    std::vector<double> v;
    for (std::size_t j = 0; j < ng; ++j) {
      if (std::abs(std::log10(grid[j] / g0)) <= 1.0 + 1e-9) {
        for (std::size_t i = 0; i < paths; ++i) v.push_back(stat[i * ng + j]);
      }
    }
    return quantile(v, 0.5);
  };
  const double stab = pooled_median(false) / pooled_median(true);
  r.add_estimate("median_last_over_first_decade", stab, 0.0);
  if (global || opt.center == 0.0) {
    r.add_check("stabilization", "lil_exponent,lil_log_power", stab, 0.0,
                1.0 / cc.tol.lil_stabilization, cc.tol.lil_stabilization);
  }
  if (opt.a8) {
    r.add_estimate("lil_bound_from_a8", std::pow(*opt.a8, -pw), 0.0);
  }
  r.wall_time = sw.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Large deviations on half-lines
// ---------------------------------------------------------------------------

/// P{t^{-gamma} Z(t) >= x} = P{Z(1) >= x t^{gamma - H(alpha-1)/alpha}} from draws of Z(1);
/// log P regressed on the speed t^gamma, gamma = 2H(alpha-1)/(alpha-2H).
inline CampaignResult verify_ldp_interval(const ModelParams& m, double x, std::vector<double> ts,
                                          std::size_t reps, const CampaignConfig& cc) {
  detail::Stopwatch sw;
  if (!m.ldp_valid()) throw DomainError("verify_ldp_interval: requires 2H < alpha");
  if (!(x > 0.0)) throw ArgumentError("verify_ldp_interval: x must be positive");
  if (ts.size() < 3) throw ArgumentError("verify_ldp_interval: need at least 3 t values");
  std::sort(ts.begin(), ts.end());
  if (!(ts.front() > 0.0)) throw ArgumentError("verify_ldp_interval: t must be positive");
  CampaignResult r;
  r.name = "ldp-interval";
  detail::echo_model(r, m);
  r.params.emplace_back("x", x);
  r.params.emplace_back("seed", static_cast<double>(cc.sim.seed));
  r.settings.emplace_back("set", "[x, inf)");
  r.sample_size = reps;
  const double gam = m.ldp_time_exponent();
  const double delta = gam - m.selfsim_index();
  const double rate = rate_function(RateFunctionSpec::lambda1_star(m), x).value();
  r.add_target("lambda1_star", rate);

  const std::vector<double> z = detail::draw(reps, mix(cc.sim.seed, 3), cc.sim.threads, [&](Rng& g) {
    return z_exact_marginal(m, 1.0, g);
  });
  std::vector<double> sz = z;
  std::sort(sz.begin(), sz.end());
  const double n = static_cast<double>(reps);
  std::vector<double> sp, lp;
  double gap = 0.0;
  r.table.columns = {"t", "speed", "threshold", "count_closed", "count_open", "log_p", "se"};
  for (double t : ts) {
    const double u = x * std::pow(t, delta);
    const auto ge = static_cast<double>(sz.end() - std::lower_bound(sz.begin(), sz.end(), u));
    const auto gt = static_cast<double>(sz.end() - std::upper_bound(sz.begin(), sz.end(), u));
    if (ge == 0.0) {
      std::ostringstream os;
      os << "verify_ldp_interval: no exceedances at t=" << t << "; enlarge reps or reduce x";
      throw WindowError(os.str());
    }
    if (ge < 50.0) r.warnings.push_back(detail::label("fewer than 50 exceedances at t", t));
    const double lpv = std::log(ge / n);
    if (gt > 0.0) gap = std::max(gap, std::abs(lpv - std::log(gt / n)));
    sp.push_back(std::pow(t, gam));
    lp.push_back(lpv);
    r.table.rows.push_back({t, sp.back(), u, ge, gt, lpv, std::sqrt((1.0 - ge / n) / ge)});
  }
  const LinearFit f = line_fit(sp, lp);
  r.add_estimate("ldp_rate", -f.coef(1), f.se(1));
  r.add_estimate("closed_open_log_gap", gap, 0.0);
  r.check_relative("ldp_rate", "lambda1_star", -f.coef(1), f.se(1), cc.tol.ldp_slope_rel);
  r.wall_time = sw.seconds();
  return r;
}

}  // namespace ltfbm
