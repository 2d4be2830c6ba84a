#pragma once

// The full verification suite: closed-form identities, growth recovery and every
// Monte Carlo campaign at its reference size, with one seed stream per campaign.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "growth.hpp"
#include "model.hpp"
#include "verify.hpp"

namespace ltfbm {

struct SuiteConfig {
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  bool quick = false;  // small sizes for smoke runs; verdicts are not meaningful
  Tolerances tol;
  double coherence_k_se = 2.0;
  double coherence_rel = 0.15;
};

namespace detail {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline CampaignResult deterministic(const std::string& name) {
  CampaignResult r;
  r.name = name;
  r.sample_size = 0;
  return r;
}

/// Records max error as an estimate and checks it against [0, tol].
inline void max_error_check(CampaignResult& r, const std::string& name, double err, double tol) {
  r.add_target(name + "_tolerance", tol);
  r.add_estimate(name, err, 0.0);
  r.add_check(name, name + "_tolerance", err, 0.0, 0.0, tol);
}

// A1 with std::tgamma in place of the library's log-gamma route.
inline double a1_transcribed(const StableParams& p) {
  const double al = p.alpha();
  const double k = p.skew_tan();
  return std::tgamma(1.0 - 1.0 / al) * std::tgamma(1.0 / al) * std::pow(p.chi(), 1.0 / al) *
         std::cos(std::atan(k) / al) /
         (std::numbers::pi * al * std::pow(1.0 + k * k, 1.0 / (2.0 * al)));
}

/// Numeric Legendre transform of Lambda1 at x, widening the theta window until it brackets.
inline double lambda1_star_numeric(const ModelParams& m, double x) {
  const RateFunctionSpec l1 = RateFunctionSpec::lambda1(m);
  double hi = 1.0;
  for (int k = 0; k < 60; ++k) {
    try {
      return legendre_numeric(l1, x, 0.0, hi, 2001);
    } catch (const WindowError&) {
      hi *= 2.0;
    }
  }
  throw NonConvergence("lambda1_star_numeric: no bracketing window", hi);
}

inline const std::vector<double> kAlphaGrid{1.2, 1.4, 1.6, 1.8, 2.0};
inline const std::vector<double> kHurstGrid{0.1, 0.2, 0.3, 0.4, 0.55};
inline const std::vector<double> kNuGrid{-0.5, 0.0, 0.5};

}  // namespace detail

/// A1 = Gamma(1-1/alpha) C(alpha), C = A1^{alpha/(alpha-1)}, Lambda1* closed form against
/// its numeric Legendre transform, and Lambda1*(x) = B2(0,1) x^kappa over a 5x5x3 grid.
inline CampaignResult closed_form_identities() {
  detail::Stopwatch sw;
  CampaignResult r = detail::deterministic("closed-forms");
  double e_a1 = 0.0, e_c = 0.0, e_leg = 0.0, e_pref = 0.0;
  std::size_t points = 0;
  for (double al : detail::kAlphaGrid) {
    for (double h : detail::kHurstGrid) {
      for (double nu : detail::kNuGrid) {
        const ModelParams m(al, nu, 1.0, h);
        const StableParams& p = m.stable();
        ++points;
        e_a1 = std::max(e_a1, detail::rel_err(a1(p), detail::a1_transcribed(p)));
        e_c = std::max(e_c, detail::rel_err(lt_growth_constant(p), std::pow(a1(p), al / (al - 1.0))));
        const RateFunctionSpec star = RateFunctionSpec::lambda1_star(m);
        const double b2 = tail_constant_b2(m, 0.0, 1.0);
        for (double x : {0.1, 0.3, 1.0, 3.0, 10.0}) {
          const double closed = rate_function(star, x).value();
          e_leg = std::max(e_leg, detail::rel_err(closed, detail::lambda1_star_numeric(m, x)));
          e_pref = std::max(e_pref, detail::rel_err(closed, b2 * std::pow(x, m.tail_exponent())));
        }
      }
    }
  }
  r.sample_size = points;
  detail::max_error_check(r, "a1_factorisation_max_rel", e_a1, 1e-12);
  detail::max_error_check(r, "c_power_identity_max_rel", e_c, 1e-12);
  detail::max_error_check(r, "legendre_max_rel", e_leg, 1e-6);
  detail::max_error_check(r, "b2_prefactor_max_rel", e_pref, 1e-10);
  r.wall_time = sw.seconds();
  return r;
}

/// davies_inversion(b3_and_rho(beta)) returns (kappa, B2) for three beta per point.
inline CampaignResult davies_invariance() {
  detail::Stopwatch sw;
  CampaignResult r = detail::deterministic("davies-invariance");
  double e_k = 0.0, e_b = 0.0;
  std::size_t points = 0;
  for (double al : detail::kAlphaGrid) {
    for (double h : detail::kHurstGrid) {
      for (double nu : detail::kNuGrid) {
        const ModelParams m(al, nu, 1.0, h);
        ++points;
        for (double f : {0.3, 0.6, 0.9}) {
          const double beta = f * m.beta_threshold();
          const EntireGrowth g = b3_and_rho(m, beta, 0.0, 1.0);
          const TailAsymptotics t = davies_inversion(g.rho, g.b3, beta);
          e_k = std::max(e_k, detail::rel_err(t.tail_exponent, m.tail_exponent()));
          e_b = std::max(e_b, detail::rel_err(t.tail_constant, tail_constant_b2(m, 0.0, 1.0)));
        }
      }
    }
  }
  r.sample_size = points;
  detail::max_error_check(r, "tail_exponent_max_rel", e_k, 1e-10);
  detail::max_error_check(r, "tail_constant_max_rel", e_b, 1e-10);
  r.wall_time = sw.seconds();
  return r;
}

/// Brownian anchor (alpha=2, nu=0, chi=2, H=1/2) against values computed from Gaussian facts:
/// L_1 = |N| so E L_1 = sqrt(2/pi); log E exp(c|N|) ~ c^2/2; Z(t) = W(L_t).
inline CampaignResult gaussian_anchor() {
  detail::Stopwatch sw;
  CampaignResult r = detail::deterministic("gaussian-anchor");
  const ModelParams m(2.0, 0.0, 2.0, 0.5);
  const StableParams& p = m.stable();
  r.sample_size = 1;
  const double e_abs_n = std::sqrt(2.0 / std::numbers::pi);
  // E L_1 = A1 Gamma(2)/Gamma(3/2)
  const double a1_oracle = e_abs_n * std::tgamma(1.5);
  // log E exp(theta^2 L_t / 2) ~ (theta^2/2)^2 t / 2
  const double b1_oracle = 0.25 / 2.0;
  // theta x - theta^4/8 is maximal at theta = (2x)^{1/3}
  const double b2_oracle = std::cbrt(2.0) - std::pow(2.0, 4.0 / 3.0) / 8.0;
  const EntireGrowth g = b3_and_rho(m, 1.0, 0.0, 1.0);
  const std::vector<std::tuple<std::string, double, double>> rows{
      {"A1", a1(p), a1_oracle},
      {"B1", growth_constant_b1(m), b1_oracle},
      {"B3_beta1", g.b3, b1_oracle},
      {"rho_beta1", g.rho, 4.0},
      {"lt_ldp_constant", lt_ldp_constant(p, 0.0, 1.0), 0.5},
      {"tail_exponent", m.tail_exponent(), 4.0 / 3.0},
      {"B2", tail_constant_b2(m, 0.0, 1.0), b2_oracle},
      {"lt_moment_1", lt_moment_exact(p, 1.0, 1.0), e_abs_n},
  };
  r.table.columns = {"index", "value", "oracle"};
  double i = 0.0;
  for (const auto& [name, v, o] : rows) {
    r.add_target(name, o);
    r.add_estimate(name, v, 0.0);
    r.add_check(name, name, v, 0.0, o - 1e-10 * std::abs(o), o + 1e-10 * std::abs(o));
    r.table.rows.push_back({i++, v, o});
  }
  r.wall_time = sw.seconds();
  return r;
}

/// Valiron order/type recovery on e^z, e^{z^2}, M1 and the Gaussian-anchor growth series.
inline CampaignResult valiron_recovery() {
  detail::Stopwatch sw;
  CampaignResult r = detail::deterministic("valiron-recovery");
  auto add = [&](const std::string& name, double est, double target, double tol) {
    r.add_target(name, target);
    r.add_estimate(name, est, 0.0);
    r.check_relative(name, name, est, 0.0, tol);
  };
  const OrderEstimate o1 = valiron_order(exp_oracle(), 400);
  add("exp_order", o1.rho, 1.0, 0.02);
  add("exp_type", valiron_type(exp_oracle(), o1.rho, 400).type_B, 1.0, 0.02);
  const OrderEstimate o2 = valiron_order(exp_square_oracle(), 400);
  add("exp_square_order", o2.rho, 2.0, 0.04);
  add("exp_square_type", valiron_type(exp_square_oracle(), o2.rho, 400).type_B, 1.0, 0.04);
  const ModelParams q(2.0, 0.0, 2.0, 0.25);
  const auto [rho1, b1] = m1_order_type(q);
  add("m1_type", valiron_type(m1_oracle(q), rho1, 800).type_B, b1, 0.03);
  const ModelParams g(2.0, 0.0, 2.0, 0.5);
  const EntireGrowth e = b3_and_rho(g, 1.0, 0.0, 1.0);
  const GrowthEstimate gb = g_beta_growth(g, 1.0, 0.0, 1.0);
  add("g_beta_order", gb.order_rho, e.rho, 0.05);
  add("g_beta_type", gb.type_B, e.b3, 0.05);
  const GrowthEstimate lt = lt_mgf_growth(g.stable(), 0.0, 1.0);
  add("lt_mgf_order", lt.order_rho, 2.0, 0.05);
  add("lt_mgf_type", lt.type_B, lt_ldp_constant(g.stable(), 0.0, 1.0), 0.05);
  r.wall_time = sw.seconds();
  return r;
}

/// Tail exponent from the tail campaign against rho/(rho - 1) from the mgf campaign.
/// Both fits are pre-asymptotic, so the band adds coherence_rel of the exact exponent
/// to coherence_k_se combined standard errors.
inline CampaignResult coherence(const CampaignResult& tail, const CampaignResult& mgf,
                                const SuiteConfig& cfg) {
  CampaignResult r = detail::deterministic("coherence");
  const double exact = tail.target("tail_exponent");
  r.add_target("tail_exponent", exact);
  const auto has = [](const CampaignResult& c, const std::string& n) {
    return std::any_of(c.estimates.begin(), c.estimates.end(),
                       [&](const Estimate& e) { return e.name == n; });
  };
  if (!has(mgf, "mgf_exponent") || !(mgf.estimate("mgf_exponent").value > 1.0)) {
    r.warnings.push_back("coherence: the mgf campaign produced no usable exponent fit");
    r.add_check("conjugacy", "tail_exponent", detail::nan, detail::nan, 0.0, 0.0);
    return r;
  }
  const Estimate& k = tail.estimate("tail_exponent");
  const Estimate& rho = mgf.estimate("mgf_exponent");
  const double conj = rho.value / (rho.value - 1.0);
  const double conj_se = rho.se / ((rho.value - 1.0) * (rho.value - 1.0));
  const double se = std::hypot(k.se, conj_se);
  r.add_estimate("tail_exponent_fit", k.value, k.se);
  r.add_estimate("mgf_conjugate_exponent", conj, conj_se);
  const double diff = k.value - conj;
  r.add_estimate("difference", diff, se);
  const double band = cfg.coherence_k_se * se + cfg.coherence_rel * exact;
  r.add_check("conjugacy", "tail_exponent", diff, se, -band, band);
  return r;
}

namespace detail {

struct SuiteEntry {
  std::string name;
  std::function<CampaignResult(const CampaignConfig&)> run;
};

}  // namespace detail

/// Every campaign in a fixed order; campaign k uses master seed mix(seed, k).
inline std::vector<CampaignResult> run_all(const SuiteConfig& cfg) {
  const bool q = cfg.quick;
  const ModelParams g(2.0, 0.0, 2.0, 0.5);
  const ModelParams s15(1.5, 0.0, 2.0, 0.5);
  auto base = [&](double dt, std::size_t n_steps) {
    CampaignConfig cc;
    cc.tol = cfg.tol;
    cc.sim.threads = cfg.threads;
    cc.sim.dt = dt;
    cc.sim.n_steps = n_steps;
    return cc;
  };
  auto named = [](CampaignResult r, const std::string& n) {
    r.name = n;
    return r;
  };

  const std::size_t moment_reps = q ? 10000 : 100000;
  const std::size_t tail_reps = q ? 100000 : 1000000;
  const TailWindow tw = q ? TailWindow{0.8, 0.9, 0.999} : TailWindow{};
  const std::size_t mod_steps = q ? (1U << 12) : (1U << 16);
  const std::size_t mod_paths = q ? 50 : 2000;
  std::vector<double> hs;
  for (int k = q ? 6 : 10; k >= (q ? 2 : 6); --k) hs.push_back(std::ldexp(1.0, -k));

  std::vector<detail::SuiteEntry> plan{
      {"moments-gaussian",
       [&](const CampaignConfig& c) {
         return named(verify_moments(g, 0.0, 1.0, {1, 2}, moment_reps, c), "moments-gaussian");
       }},
      {"moments-interval-alpha2",
       [&](const CampaignConfig& c) {
         return named(verify_moments(g, 1.0, 2.0, {1, 2, 3, 4}, moment_reps, c),
                      "moments-interval-alpha2");
       }},
      {"moments-interval-alpha1.5",
       [&](const CampaignConfig& c) {
         return named(verify_moments(s15, 1.0, 2.0, {1, 2, 3, 4}, moment_reps, c),
                      "moments-interval-alpha1.5");
       }},
      {"lt-estimators",
       [&](const CampaignConfig& c) {
         return verify_lt_estimators(g.stable(), 1.0, q ? 2000 : 40000, q ? (1U << 12) : (1U << 15), c);
       }},
      {"mgf",
       [&](const CampaignConfig& c) {
         return verify_mgf(g, {1.0, 1.05, 1.1, 1.15, 1.2, 1.25}, {6, 8, 10, 12, 14, 16, 18}, q ? 200000 : 2000000, c);
       }},
      {"tail", [&](const CampaignConfig& c) { return verify_tail(g, 0.0, 1.0, tail_reps, tw, c); }},
      {"lt-tail",
       [&](const CampaignConfig& c) { return verify_lt_tail(g.stable(), 0.0, 1.0, tail_reps, tw, c); }},
      {"max-tail",
       [&](const CampaignConfig& c) {
         CampaignConfig cc = c;
         cc.sim.n_steps = q ? 256 : 2048;
         cc.sim.dt = 1.0 / static_cast<double>(cc.sim.n_steps);
         return verify_max_tail(g, 0.0, 1.0, 100000, {}, cc);
       }},
      {"modulus-alpha2",
       [&](const CampaignConfig& c) {
         CampaignConfig cc = c;
         cc.sim.n_steps = mod_steps;
         cc.sim.dt = 1.0 / static_cast<double>(mod_steps);
         return named(verify_modulus(g, hs, mod_paths, cc), "modulus-alpha2");
       }},
      {"modulus-alpha1.5",
       [&](const CampaignConfig& c) {
         CampaignConfig cc = c;
         cc.sim.n_steps = mod_steps;
         cc.sim.dt = 1.0 / static_cast<double>(mod_steps);
         return named(verify_modulus(s15, hs, mod_paths, cc), "modulus-alpha1.5");
       }},
      {"lil-global",
       [&](const CampaignConfig& c) {
         CampaignConfig cc = c;
         cc.sim.dt = 10.0 / 64.0;
         return verify_lil(g, {10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000}, q ? 200 : 500,
                           LilOptions{}, cc);
       }},
      {"lil-local",
       [&](const CampaignConfig& c) {
         CampaignConfig cc = c;
         cc.sim.dt = 1e-4 / 64.0;
         return verify_lil(g, {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1},
                           q ? 200 : 500, LilOptions{LilMode::local, 0.0, {}}, cc);
       }},
      {"ldp-interval",
       [&](const CampaignConfig& c) {
         return verify_ldp_interval(g, 1.0, {1, 2, 3, 4, 5, 6, 7, 8}, q ? 100000 : 1000000, c);
       }},
  };

  std::vector<CampaignResult> out;
  out.push_back(closed_form_identities());
  out.push_back(davies_invariance());
  out.push_back(gaussian_anchor());
  out.push_back(valiron_recovery());
  for (std::size_t k = 0; k < plan.size(); ++k) {
    CampaignConfig cc = base(1.0 / 256.0, 512);
    cc.sim.w_method = WMethod::exact_points;
    if (plan[k].name.rfind("modulus", 0) == 0 || plan[k].name.rfind("lil", 0) == 0 ||
        plan[k].name == "max-tail") {
      cc.sim.w_method = WMethod::grid;
    }
    cc.sim.seed = mix(cfg.seed, k);
    out.push_back(plan[k].run(cc));
  }
  const auto find = [&](const std::string& n) -> const CampaignResult& {
    return *std::find_if(out.begin(), out.end(), [&](const CampaignResult& r) { return r.name == n; });
  };
  out.push_back(coherence(find("tail"), find("mgf"), cfg));
  return out;
}

}  // namespace ltfbm
