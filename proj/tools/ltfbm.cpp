// ltfbm: constants, rate functions, simulation, growth analysis and verification campaigns.
//
// Every run resolves its configuration as defaults < --config file < LTFBM_OUTPUT_DIR < flags,
// writes the resolved config to <out>/<subcommand>.config.json and its outputs next to it.
// Exit codes: 0 all verdicts pass, 2 some verdict fails, 1 usage, config or domain error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltfbm/fbm.hpp"
#include "ltfbm/growth.hpp"
#include "ltfbm/io.hpp"
#include "ltfbm/local_time.hpp"
#include "ltfbm/model.hpp"
#include "ltfbm/parallel.hpp"
#include "ltfbm/simulate.hpp"
#include "ltfbm/stable.hpp"
#include "ltfbm/suite.hpp"
#include "ltfbm/verify.hpp"

namespace {

using ltfbm::Json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands{"constants",   "rate",           "simulate",   "growth",
                                         "verify-moments", "verify-mgf",  "verify-tail", "verify-max",
                                         "verify-modulus", "verify-lil",  "verify-ldp", "all"};

const std::map<std::string, std::string> kSummaries{
    {"constants", "print every model constant as JSON"},
    {"rate", "evaluate a rate function or its Legendre transform"},
    {"simulate", "write sample paths of X, W, L or Z as CSV"},
    {"growth", "order and type of a series from its Taylor coefficients"},
    {"verify-moments", "moments of L and Z against exact values or bounds"},
    {"verify-mgf", "log-MGF growth in t and its exponent in theta"},
    {"verify-tail", "upper-tail exponent and constant of Z or L"},
    {"verify-max", "tail of the running maximum"},
    {"verify-modulus", "modulus of continuity scaling"},
    {"verify-lil", "iterated-logarithm statistic, global or local"},
    {"verify-ldp", "large-deviation rate on a half-line"},
    {"all", "the full verification suite"}};

Json sim_block(double dt, std::size_t n_steps, const char* w_method) {
  return {{"dt", dt},
          {"n_steps", n_steps},
          {"local_time_method", "inverse_subordinator"},
          {"w_method", w_method},
          {"epsilon_spread", 1.0},
          {"fbm_oversample", 4},
          {"subordinator_refine", 16.0}};
}

Json tolerance_block() {
  const ltfbm::Tolerances t;
  return {{"moment_k_se", t.moment_k_se},
          {"undersampling_rel_se", t.undersampling_rel_se},
          {"mgf_slope_rel", t.mgf_slope_rel},
          {"mgf_exponent_rel", t.mgf_exponent_rel},
          {"mgf_symmetry_rms", t.mgf_symmetry_rms},
          {"tail_exponent_rel", t.tail_exponent_rel},
          {"tail_constant_rel", t.tail_constant_rel},
          {"max_tail_r2", t.max_tail_r2},
          {"max_tail_k_se", t.max_tail_k_se},
          {"modulus_slope_abs", t.modulus_slope_abs},
          {"lil_k_se", t.lil_k_se},
          {"lil_stabilization", t.lil_stabilization},
          {"ldp_slope_rel", t.ldp_slope_rel}};
}

Json command_block(const std::string& cmd) {
  std::vector<double> hs;
  for (int k = 10; k >= 6; --k) hs.push_back(std::ldexp(1.0, -k));
  if (cmd == "constants") return {{"a", 0.0}, {"b", 1.0}, {"beta", 1.0}};
  if (cmd == "rate") return {{"kind", "lambda1_star"}, {"x", 1.0}, {"a", 0.0}, {"b", 1.0}};
  if (cmd == "simulate") return {{"process", "z"}, {"paths", 1}};
  if (cmd == "growth") {
    return {{"series", "z_mgf"}, {"beta", 1.0}, {"a", 0.0}, {"b", 1.0}, {"p_max", 800}};
  }
  if (cmd == "verify-moments") {
    return {{"a", 0.0}, {"b", 1.0}, {"orders", {1, 2}}, {"reps", 100000}};
  }
  if (cmd == "verify-mgf") {
    return {{"thetas", {1.0, 1.05, 1.1, 1.15, 1.2, 1.25}}, {"ts", {6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0}}, {"reps", 2000000}};
  }
  if (cmd == "verify-tail") {
    return {{"process", "z"}, {"a", 0.0},          {"b", 1.0},        {"reps", 1000000},
            {"mle_quantile", 0.8}, {"fit_lo", 0.9}, {"fit_hi", 0.9999}};
  }
  if (cmd == "verify-max") return {{"a", 0.0}, {"b", 1.0}, {"reps", 100000}, {"x_grid", Json::array()}};
  if (cmd == "verify-modulus") return {{"h_grid", hs}, {"paths", 2000}};
  if (cmd == "verify-lil") {
    return {{"mode", "global"}, {"grid", Json::array()}, {"paths", 500}, {"center", 0.0}, {"resolution", 64}};
  }
  if (cmd == "verify-ldp") {
    return {{"x", 1.0}, {"ts", {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}}, {"reps", 1000000}};
  }
  if (cmd == "all") return {{"quick", false}};
  throw UsageError("unknown subcommand " + cmd);
}

Json defaults(const std::string& cmd) {
  Json j;
  j["model"] = {{"alpha", 2.0}, {"nu", 0.0}, {"chi", 2.0}, {"hurst", 0.5}};
  j["seed"] = cmd == "all" ? ltfbm::SuiteConfig{}.seed : 1;
  j["threads"] = ltfbm::default_threads();
  j["output_dir"] = "ltfbm-out";
  if (cmd == "verify-max") {
    j["sim"] = sim_block(1.0 / 2048.0, 2048, "grid");
  } else if (cmd == "verify-modulus") {
    j["sim"] = sim_block(1.0 / 65536.0, 65536, "grid");
  } else if (cmd == "verify-lil" || cmd == "simulate") {
    j["sim"] = sim_block(1.0 / 1024.0, 1024, "grid");
  } else {
    j["sim"] = sim_block(1.0 / 256.0, 512, "exact_points");
  }
  j["tolerances"] = tolerance_block();
  j[cmd] = command_block(cmd);
  return j;
}

bool same_kind(const Json& like, const Json& v) {
  if (like.is_number_integer()) return v.is_number_integer() && v.get<double>() >= 0.0;
  if (like.is_number()) return v.is_number();
  if (like.is_array()) {
    return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); });
  }
  return like.type() == v.type();
}

/// Overlays patch onto base; keys absent from base are rejected.
void merge_checked(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object()) throw UsageError("config: " + where + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw UsageError("config: unknown key " + path);
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), path);
    } else {
      if (!same_kind(slot, it.value())) throw UsageError("config: wrong type for " + path);
      slot = it.value();
    }
  }
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(what + ": not a number: " + s);
  }
  if (pos != s.size()) throw UsageError(what + ": not a number: " + s);
  return v;
}

Json parse_like(const Json& like, const std::string& raw, const std::string& what) {
  if (like.is_string()) return raw;
  if (like.is_boolean()) {
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw UsageError(what + ": expected true or false");
  }
  if (like.is_number_float()) return parse_double(raw, what);
  if (like.is_number()) {
    const double v = parse_double(raw, what);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
      throw UsageError(what + ": expected a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
  }
  if (like.is_array()) {
    Json arr = Json::array();
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) arr.push_back(parse_double(item, what));
    }
    return arr;
  }
  throw UsageError(what + ": cannot be set from the command line");
}

struct Binding {
  std::vector<std::string> path;
  std::string raw;
  CLI::Option* opt = nullptr;
};

template <class T>
T get(const Json& j, const std::string& key) {
  return j.at(key).get<T>();
}

ltfbm::ModelParams model_of(const Json& c) {
  const Json& m = c.at("model");
  return ltfbm::ModelParams(get<double>(m, "alpha"), get<double>(m, "nu"), get<double>(m, "chi"),
                            get<double>(m, "hurst"));
}

ltfbm::LocalTimeMethod lt_method_of(const std::string& s) {
  if (s == "inverse_subordinator") return ltfbm::LocalTimeMethod::inverse_subordinator;
  if (s == "occupation") return ltfbm::LocalTimeMethod::occupation;
  throw UsageError("config: sim.local_time_method must be inverse_subordinator or occupation");
}

ltfbm::WMethod w_method_of(const std::string& s) {
  if (s == "grid") return ltfbm::WMethod::grid;
  if (s == "exact_points") return ltfbm::WMethod::exact_points;
  throw UsageError("config: sim.w_method must be grid or exact_points");
}

ltfbm::CampaignConfig campaign_of(const Json& c) {
  ltfbm::CampaignConfig cc;
  const Json& s = c.at("sim");
  cc.sim.dt = get<double>(s, "dt");
  cc.sim.n_steps = get<std::size_t>(s, "n_steps");
  cc.sim.local_time_method = lt_method_of(get<std::string>(s, "local_time_method"));
  cc.sim.w_method = w_method_of(get<std::string>(s, "w_method"));
  cc.sim.epsilon_spread = get<double>(s, "epsilon_spread");
  cc.sim.fbm_oversample = get<std::size_t>(s, "fbm_oversample");
  cc.sim.subordinator_refine = get<double>(s, "subordinator_refine");
  cc.sim.seed = get<std::uint64_t>(c, "seed");
  cc.sim.threads = get<unsigned>(c, "threads");
  cc.sim.validate();
  const Json& t = c.at("tolerances");
  ltfbm::Tolerances& tol = cc.tol;
  tol.moment_k_se = get<double>(t, "moment_k_se");
  tol.undersampling_rel_se = get<double>(t, "undersampling_rel_se");
  tol.mgf_slope_rel = get<double>(t, "mgf_slope_rel");
  tol.mgf_exponent_rel = get<double>(t, "mgf_exponent_rel");
  tol.mgf_symmetry_rms = get<double>(t, "mgf_symmetry_rms");
  tol.tail_exponent_rel = get<double>(t, "tail_exponent_rel");
  tol.tail_constant_rel = get<double>(t, "tail_constant_rel");
  tol.max_tail_r2 = get<double>(t, "max_tail_r2");
  tol.max_tail_k_se = get<double>(t, "max_tail_k_se");
  tol.modulus_slope_abs = get<double>(t, "modulus_slope_abs");
  tol.lil_k_se = get<double>(t, "lil_k_se");
  tol.lil_stabilization = get<double>(t, "lil_stabilization");
  tol.ldp_slope_rel = get<double>(t, "ldp_slope_rel");
  return cc;
}

/// The part of the config that determines results: no threads, no output directory.
Json report_config(const Json& c) {
  Json r = c;
  r.erase("threads");
  r.erase("output_dir");
  return r;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int finish(const std::filesystem::path& out, const std::string& cmd,
           const std::vector<ltfbm::CampaignResult>& rs, const Json& c) {
  ltfbm::write_reports(out, cmd, rs, report_config(c));
  bool pass = true;
  for (const auto& r : rs) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << r.name << ": " << w << "\n";
    for (const auto& k : r.checks) {
      std::cout << (k.pass ? "PASS " : "FAIL ") << r.name << "/" << k.name << " estimate=" << k.estimate
                << " window=[" << k.lower << ", " << k.upper << "]\n";
    }
    pass = pass && r.pass();
  }
  return pass ? 0 : 2;
}

int run_constants(const Json& c, const std::filesystem::path& out) {
  const ltfbm::ModelParams m = model_of(c);
  const ltfbm::StableParams& p = m.stable();
  const Json& b = c.at("constants");
  const double a = get<double>(b, "a");
  const double bb = get<double>(b, "b");
  const double beta = get<double>(b, "beta");
  Json j;
  j["alpha"] = m.alpha();
  j["nu"] = p.nu();
  j["chi"] = p.chi();
  j["hurst"] = m.hurst();
  j["a"] = a;
  j["b"] = bb;
  j["C_alpha"] = ltfbm::c_alpha(p);
  j["A1"] = ltfbm::a1(p);
  j["C"] = ltfbm::lt_growth_constant(p);
  j["lt_ldp_constant"] = ltfbm::lt_ldp_constant(p, a, bb);
  j["lt_tail_constant"] = ltfbm::lt_tail_constant(p, a, bb);
  j["selfsim_index"] = m.selfsim_index();
  j["tail_exponent"] = m.tail_exponent();
  j["interval_exponent"] = m.interval_exponent();
  j["log_power"] = m.log_power();
  j["beta_threshold"] = m.beta_threshold();
  j["B2"] = ltfbm::tail_constant_b2(m, a, bb);
  j["ldp_valid"] = m.ldp_valid();
  if (m.ldp_valid()) {
    j["B1"] = ltfbm::growth_constant_b1(m);
    j["mgf_exponent"] = m.mgf_exponent();
    j["ldp_time_exponent"] = m.ldp_time_exponent();
  } else {
    j["B1"] = nullptr;
    j["mgf_exponent"] = nullptr;
    j["ldp_time_exponent"] = nullptr;
  }
  j["beta"] = beta;
  if (beta < m.beta_threshold()) {
    const ltfbm::EntireGrowth g = ltfbm::b3_and_rho(m, beta, a, bb);
    j["rho"] = g.rho;
    j["B3"] = g.b3;
  } else {
    j["rho"] = nullptr;
    j["B3"] = nullptr;
  }
  const std::string s = j.dump(2) + "\n";
  ltfbm::write_text(out / "constants.json", s);
  std::cout << s;
  return 0;
}

int run_rate(const Json& c, const std::filesystem::path& out) {
  const ltfbm::ModelParams m = model_of(c);
  const Json& b = c.at("rate");
  const std::string kind = get<std::string>(b, "kind");
  const double a = get<double>(b, "a");
  const double bb = get<double>(b, "b");
  ltfbm::RateFunctionSpec spec{};
  if (kind == "lambda1") {
    spec = ltfbm::RateFunctionSpec::lambda1(m);
  } else if (kind == "lambda1_star") {
    spec = ltfbm::RateFunctionSpec::lambda1_star(m);
  } else if (kind == "lambda2") {
    spec = ltfbm::RateFunctionSpec::lambda2(m.stable(), a, bb);
  } else if (kind == "lambda2_star") {
    spec = ltfbm::RateFunctionSpec::lambda2_star(m.stable(), a, bb);
  } else {
    throw UsageError("config: rate.kind must be lambda1, lambda1_star, lambda2 or lambda2_star");
  }
  const double x = get<double>(b, "x");
  const ltfbm::ExtendedReal v = ltfbm::rate_function(spec, x);
  Json j;
  j["kind"] = kind;
  j["x"] = x;
  j["prefactor"] = spec.prefactor;
  j["exponent"] = spec.exponent;
  j["value"] = v.is_infinite() ? Json("+inf") : Json(v.value());
  const std::string s = j.dump(2) + "\n";
  ltfbm::write_text(out / "rate.json", s);
  std::cout << s;
  return 0;
}

int run_simulate(const Json& c, const std::filesystem::path& out) {
  const ltfbm::ModelParams m = model_of(c);
  const ltfbm::CampaignConfig cc = campaign_of(c);
  const ltfbm::SimConfig& sc = cc.sim;
  const Json& b = c.at("simulate");
  const std::string proc = get<std::string>(b, "process");
  const auto paths = get<std::size_t>(b, "paths");
  if (paths < 1) throw UsageError("config: simulate.paths must be >= 1");
  std::filesystem::create_directories(out);
  const auto& p = m.stable();
  for (std::size_t k = 0; k < paths; ++k) {
    const std::uint64_t rs = ltfbm::replicate_seed(sc.seed, k);
    Json meta;
    meta["process"] = proc;
    meta["params"] = c.at("model");
    meta["seed"] = sc.seed;
    meta["replicate"] = k;
    meta["dt"] = sc.dt;
    meta["n_steps"] = sc.n_steps;
    const bool occ = sc.local_time_method == ltfbm::LocalTimeMethod::occupation;
    const double eps = ltfbm::occupation_epsilon(p, sc.dt, sc.epsilon_spread);
    auto lt_meta = [&] {
      meta["method"] = ltfbm::to_string(sc.local_time_method);
      meta["epsilon"] = occ ? Json(eps) : Json(nullptr);
      meta["calibration_constant"] = occ ? Json(nullptr) : Json(ltfbm::subordinator_calibration(p));
      meta["subordinator_step"] =
          occ ? Json(nullptr) : Json(ltfbm::subordinator_step(p, sc.dt, sc.subordinator_refine));
    };
    std::string csv;
    if (proc == "stable") {
      meta["method"] = "chambers_mallows_stuck";
      csv = ltfbm::path_csv(ltfbm::stable_path(p, sc.dt, sc.n_steps, ltfbm::stream_x(rs)));
    } else if (proc == "fbm") {
      meta["method"] = "circulant_embedding";
      csv = ltfbm::path_csv(ltfbm::fbm_grid(m.hurst(), sc.n_steps, sc.dt, ltfbm::stream_w(rs)));
    } else if (proc == "local_time") {
      lt_meta();
      csv = ltfbm::path_csv(ltfbm::local_time_path(p, sc, ltfbm::stream_x(rs)));
    } else if (proc == "z") {
      lt_meta();
      meta["fbm_grid_step"] = ltfbm::fbm_grid_step(p, sc);
      csv = ltfbm::path_csv(ltfbm::z_path(m, sc, rs).z);
    } else {
      throw UsageError("config: simulate.process must be stable, fbm, local_time or z");
    }
    const std::string stem = "simulate.path_" + std::to_string(k);
    ltfbm::write_text(out / (stem + ".csv"), csv);
    ltfbm::write_text(out / (stem + ".json"), meta.dump(2) + "\n");
  }
  std::cout << "wrote " << paths << " path(s) to " << out.string() << "\n";
  return 0;
}

int run_growth(const Json& c, const std::filesystem::path& out) {
  const ltfbm::ModelParams m = model_of(c);
  const Json& b = c.at("growth");
  const std::string series = get<std::string>(b, "series");
  const double beta = get<double>(b, "beta");
  const double a = get<double>(b, "a");
  const double bb = get<double>(b, "b");
  const auto p_max = get<std::size_t>(b, "p_max");
  ltfbm::GrowthEstimate g;
  double t_order = std::nan("");
  double t_type = std::nan("");
  if (series == "z_mgf") {
    g = ltfbm::z_logmgf_growth(m, p_max);
    t_order = m.mgf_exponent();
    t_type = ltfbm::growth_constant_b1(m);
  } else if (series == "m1") {
    g = ltfbm::valiron_growth(ltfbm::m1_oracle(m), p_max);
    std::tie(t_order, t_type) = ltfbm::m1_order_type(m);
  } else if (series == "g_beta") {
    g = ltfbm::g_beta_growth(m, beta, a, bb, p_max);
    const ltfbm::EntireGrowth e = ltfbm::b3_and_rho(m, beta, a, bb);
    t_order = e.rho;
    t_type = e.b3;
  } else if (series == "lt_mgf") {
    g = ltfbm::lt_mgf_growth(m.stable(), a, bb, p_max);
    t_order = m.alpha() / (m.alpha() - 1.0);
    t_type = ltfbm::lt_ldp_constant(m.stable(), a, bb);
  } else if (series == "exp") {
    g = ltfbm::valiron_growth(ltfbm::exp_oracle(), p_max);
    t_order = 1.0;
    t_type = 1.0;
  } else if (series == "exp_square") {
    g = ltfbm::valiron_growth(ltfbm::exp_square_oracle(), p_max);
    t_order = 2.0;
    t_type = 1.0;
  } else {
    throw UsageError("config: growth.series must be z_mgf, m1, g_beta, lt_mgf, exp or exp_square");
  }
  Json j;
  j["series"] = series;
  j["order"] = num(g.order_rho);
  j["type"] = num(g.type_B);
  j["target_order"] = num(t_order);
  j["target_type"] = num(t_type);
  j["converged"] = g.converged;
  j["oscillation"] = num(g.oscillation);
  j["sup_condition"] = g.sup_condition;
  j["sup_ratio"] = num(g.sup_ratio);
  j["type_uncertainty"] = num(g.type_uncertainty);
  std::filesystem::create_directories(out);
  ltfbm::write_text(out / "growth.json", j.dump(2) + "\n");
  ltfbm::write_text(out / "growth.csv", ltfbm::growth_csv(g));
  std::cout << j.dump(2) << "\n";
  return g.converged && g.sup_condition ? 0 : 2;
}

std::vector<double> doubles(const Json& j, const std::string& key) {
  return j.at(key).get<std::vector<double>>();
}

int run_verify(const std::string& cmd, const Json& c, const std::filesystem::path& out) {
  const ltfbm::ModelParams m = model_of(c);
  ltfbm::CampaignConfig cc = campaign_of(c);
  const Json& b = c.at(cmd);
  std::vector<ltfbm::CampaignResult> rs;
  if (cmd == "verify-moments") {
    std::vector<int> orders;
    for (double o : doubles(b, "orders")) {
      if (o != std::floor(o)) throw UsageError("config: verify-moments.orders must be integers");
      orders.push_back(static_cast<int>(o));
    }
    rs.push_back(ltfbm::verify_moments(m, get<double>(b, "a"), get<double>(b, "b"), orders,
                                       get<std::size_t>(b, "reps"), cc));
  } else if (cmd == "verify-mgf") {
    rs.push_back(ltfbm::verify_mgf(m, doubles(b, "thetas"), doubles(b, "ts"), get<std::size_t>(b, "reps"), cc));
  } else if (cmd == "verify-tail") {
    const ltfbm::TailWindow w{get<double>(b, "mle_quantile"), get<double>(b, "fit_lo"),
                              get<double>(b, "fit_hi")};
    const std::string proc = get<std::string>(b, "process");
    const double a = get<double>(b, "a");
    const double bb = get<double>(b, "b");
    const auto reps = get<std::size_t>(b, "reps");
    if (proc == "z") {
      rs.push_back(ltfbm::verify_tail(m, a, bb, reps, w, cc));
    } else if (proc == "lt") {
      rs.push_back(ltfbm::verify_lt_tail(m.stable(), a, bb, reps, w, cc));
    } else {
      throw UsageError("config: verify-tail.process must be z or lt");
    }
  } else if (cmd == "verify-max") {
    rs.push_back(ltfbm::verify_max_tail(m, get<double>(b, "a"), get<double>(b, "b"),
                                        get<std::size_t>(b, "reps"), doubles(b, "x_grid"), cc));
  } else if (cmd == "verify-modulus") {
    rs.push_back(ltfbm::verify_modulus(m, doubles(b, "h_grid"), get<std::size_t>(b, "paths"), cc));
  } else if (cmd == "verify-lil") {
    ltfbm::LilOptions opt;
    const std::string mode = get<std::string>(b, "mode");
    if (mode == "global") {
      opt.mode = ltfbm::LilMode::global;
    } else if (mode == "local") {
      opt.mode = ltfbm::LilMode::local;
    } else {
      throw UsageError("config: verify-lil.mode must be global or local");
    }
    opt.center = get<double>(b, "center");
    std::vector<double> grid = doubles(b, "grid");
    const auto res = get<std::size_t>(b, "resolution");
    if (res < 8) throw UsageError("config: verify-lil.resolution must be >= 8");
    cc.sim.dt = *std::min_element(grid.begin(), grid.end()) / static_cast<double>(res);
    rs.push_back(ltfbm::verify_lil(m, grid, get<std::size_t>(b, "paths"), opt, cc));
  } else if (cmd == "verify-ldp") {
    rs.push_back(ltfbm::verify_ldp_interval(m, get<double>(b, "x"), doubles(b, "ts"),
                                            get<std::size_t>(b, "reps"), cc));
  }
  return finish(out, cmd, rs, c);
}

int run_all(const Json& c, const std::filesystem::path& out) {
  ltfbm::SuiteConfig sc;
  sc.seed = get<std::uint64_t>(c, "seed");
  sc.threads = get<unsigned>(c, "threads");
  sc.quick = c.at("all").at("quick").get<bool>();
  sc.tol = campaign_of(c).tol;
  return finish(out, "all", ltfbm::run_all(sc), c);
}

/// Grid defaults that depend on other values are made concrete so the resolved config is complete.
void complete(const std::string& cmd, Json& c) {
  if (cmd == "verify-lil") {
    Json& b = c[cmd];
    if (b["grid"].empty()) {
      b["grid"] = b["mode"] == "local"
                      ? Json{1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1}
                      : Json{10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0};
    }
    double lo = 1e300;
    for (const auto& v : b["grid"]) lo = std::min(lo, v.get<double>());
    c["sim"]["dt"] = lo / b["resolution"].get<double>();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local time fractional Brownian motion: constants, simulation and verification"};
  app.require_subcommand(1);
  std::deque<Binding> bindings;
  std::map<std::string, std::string> config_file;
  std::map<std::string, std::string> out_flag;

  for (const std::string& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd, kSummaries.at(cmd));
    const Json d = defaults(cmd);
    sub->add_option("--config", config_file[cmd], "JSON config file (unknown keys rejected)");
    sub->add_option("--out", out_flag[cmd], "output directory (overrides LTFBM_OUTPUT_DIR)");
    auto bind = [&](const std::string& flag, std::vector<std::string> path, const std::string& help) {
      bindings.push_back({std::move(path), "", nullptr});
      Binding& bd = bindings.back();
      bd.opt = sub->add_option(flag, bd.raw, help);
      bd.path.insert(bd.path.begin(), cmd);  // owner tag, stripped before use
    };
    bind("--alpha", {"model", "alpha"}, "stability index in (1, 2]");
    bind("--nu", {"model", "nu"}, "skewness in [-1, 1]");
    bind("--chi", {"model", "chi"}, "scale chi > 0");
    bind("--hurst", {"model", "hurst"}, "Hurst index in (0, 1)");
    bind("--seed", {"seed"}, "master seed");
    bind("--threads", {"threads"}, "worker threads");
    bind("--dt", {"sim", "dt"}, "time step");
    bind("--n-steps", {"sim", "n_steps"}, "number of steps");
    bind("--lt-method", {"sim", "local_time_method"}, "inverse_subordinator or occupation");
    bind("--w-method", {"sim", "w_method"}, "grid or exact_points");
    for (auto it = d[cmd].begin(); it != d[cmd].end(); ++it) {
      std::string flag = "--" + it.key();
      std::replace(flag.begin(), flag.end(), '_', '-');
      bind(flag, {cmd, it.key()}, "");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::string cmd;
  for (const std::string& k : kCommands) {
    if (app.got_subcommand(k)) cmd = k;
  }
  try {
    Json c = defaults(cmd);
    // other subcommands' blocks are accepted in a shared file but ignored
    Json schema = c;
    for (const std::string& k : kCommands) schema[k] = command_block(k);
    if (!config_file[cmd].empty()) {
      std::ifstream f(config_file[cmd]);
      if (!f) throw UsageError("cannot read config " + config_file[cmd]);
      Json file;
      try {
        file = Json::parse(f);
      } catch (const Json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
      merge_checked(schema, file, "");
      for (auto it = c.begin(); it != c.end(); ++it) it.value() = schema[it.key()];
    }
    if (const char* env = std::getenv("LTFBM_OUTPUT_DIR"); env && *env) c["output_dir"] = env;
    if (!out_flag[cmd].empty()) c["output_dir"] = out_flag[cmd];
    for (const Binding& bd : bindings) {
      if (bd.path.front() != cmd || bd.opt->count() == 0) continue;
      Json* slot = &c;
      std::string what;
      for (std::size_t i = 1; i < bd.path.size(); ++i) {
        slot = &(*slot)[bd.path[i]];
        what += (i > 1 ? "." : "") + bd.path[i];
      }
      *slot = parse_like(*slot, bd.raw, what);
    }
    if (get<unsigned>(c, "threads") < 1) throw UsageError("threads must be >= 1");
    complete(cmd, c);

    const std::filesystem::path out = get<std::string>(c, "output_dir");
    std::filesystem::create_directories(out);
    ltfbm::write_text(out / (cmd + ".config.json"), c.dump(2) + "\n");

    if (cmd == "constants") return run_constants(c, out);
    if (cmd == "rate") return run_rate(c, out);
    if (cmd == "simulate") return run_simulate(c, out);
    if (cmd == "growth") return run_growth(c, out);
    if (cmd == "all") return run_all(c, out);
    return run_verify(cmd, c, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ltfbm::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
