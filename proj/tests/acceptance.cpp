// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.
// Tolerances are fixed here rather than taken from the campaign verdicts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ltfbm/io.hpp"
#include "ltfbm/suite.hpp"

using namespace ltfbm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

const CampaignResult& find(const std::vector<CampaignResult>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.name == name) return r;
  }
  throw ArgumentError("acceptance: missing campaign " + name);
}

double wall(const std::vector<CampaignResult>& rs, std::initializer_list<const char*> names) {
  double s = 0.0;
  for (const char* n : names) s += find(rs, n).wall_time;
  return s;
}

// |estimate - target| <= tol on a named estimate; tol < 0 means relative |tol|.
void near(Outcome& v, const CampaignResult& r, const std::string& est, double target, double tol) {
  const double x = r.estimate(est).value;
  const double band = tol < 0 ? -tol * std::abs(target) : tol;
  v.require(std::abs(x - target) <= band,
            r.name + "/" + est + "=" + fmt(x) + " outside " + fmt(target) + "+-" + fmt(band));
}

void check_passes(Outcome& v, const CampaignResult& r, const std::string& check) {
  const Check& c = r.check(check);
  v.require(c.pass, r.name + "/" + check + "=" + fmt(c.estimate) + " outside [" + fmt(c.lower) + ", " +
                        fmt(c.upper) + "]");
}

void max_error_below(Outcome& v, const CampaignResult& r, const std::string& est, double tol) {
  const double x = r.estimate(est).value;
  v.require(x <= tol, r.name + "/" + est + "=" + fmt(x) + " > " + fmt(tol));
}

void runtime_below(Outcome& v, double secs, double limit) {
  v.require(secs < limit, "runtime " + fmt(secs) + " s >= " + fmt(limit) + " s");
}

bool report(int k, const std::string& title, Outcome v, double secs) {
  std::printf("%s criterion %d: %s (%.1f s)%s%s\n", v.pass ? "PASS" : "FAIL", k, title.c_str(), secs,
              v.detail.empty() ? "" : " -- ", v.detail.c_str());
  std::fflush(stdout);
  return v.pass;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Every report file except the wall-time record must match byte for byte.
void same_reports(Outcome& v, const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".timing.json")) continue;
    ++n;
    if (!fs::exists(b / name)) {
      v.require(false, name + " missing from second run");
    } else if (slurp(e.path()) != slurp(b / name)) {
      v.require(false, name + " differs");
    }
  }
  v.require(n >= 3, "too few report files (" + std::to_string(n) + ")");
}

}  // namespace

int main() {
  bool all = true;
  const SuiteConfig base;
  const ModelParams gauss(2.0, 0.0, 2.0, 0.5);

  {
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignResult r = closed_form_identities();
    const double secs = seconds_since(t0);
    Outcome v;
    max_error_below(v, r, "a1_factorisation_max_rel", 1e-12);
    max_error_below(v, r, "c_power_identity_max_rel", 1e-12);
    max_error_below(v, r, "legendre_max_rel", 1e-6);
    max_error_below(v, r, "b2_prefactor_max_rel", 1e-10);
    v.require(r.sample_size == 75, "grid has " + std::to_string(r.sample_size) + " points, want 75");
    runtime_below(v, secs, 1.0);
    all &= report(1, "closed-form identities", v, secs);
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignResult r = davies_invariance();
    const double secs = seconds_since(t0);
    Outcome v;
    max_error_below(v, r, "tail_exponent_max_rel", 1e-10);
    max_error_below(v, r, "tail_constant_max_rel", 1e-10);
    runtime_below(v, secs, 1.0);
    all &= report(2, "Davies inversion beta invariance", v, secs);
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignResult r = gaussian_anchor();
    const double secs = seconds_since(t0);
    Outcome v;
    near(v, r, "A1", std::sqrt(2.0) / 2.0, -1e-10);
    near(v, r, "B1", 0.125, -1e-10);
    near(v, r, "B3_beta1", 0.125, -1e-10);
    near(v, r, "rho_beta1", 4.0, -1e-10);
    near(v, r, "lt_ldp_constant", 0.5, -1e-10);
    near(v, r, "tail_exponent", 4.0 / 3.0, -1e-10);
    near(v, r, "B2", 0.75 * std::cbrt(2.0), -1e-10);
    runtime_below(v, secs, 1.0);
    all &= report(3, "Gaussian anchor constants", v, secs);
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignResult r = valiron_recovery();
    const double secs = seconds_since(t0);
    Outcome v;
    near(v, r, "exp_order", 1.0, -0.02);
    near(v, r, "exp_type", 1.0, -0.02);
    near(v, r, "exp_square_order", 2.0, -0.04);
    near(v, r, "exp_square_type", 1.0, -0.04);
    near(v, r, "m1_type", r.target("m1_type"), -0.03);
    near(v, r, "g_beta_order", 4.0, -0.05);
    near(v, r, "g_beta_type", 0.125, -0.05);
    near(v, r, "lt_mgf_order", 2.0, -0.05);
    near(v, r, "lt_mgf_type", 0.5, -0.05);
    runtime_below(v, secs, 30.0);
    all &= report(4, "Valiron order and type recovery", v, secs);
  }

  std::printf("running the full suite with 1 worker...\n");
  std::fflush(stdout);
  SuiteConfig c1 = base;
  c1.threads = 1;
  const std::vector<CampaignResult> rs = run_all(c1);

  {
    Outcome v;
    const double target = std::sqrt(2.0 / std::numbers::pi);
    const CampaignResult& g = find(rs, "moments-gaussian");
    v.require(g.sample_size == 100000, "moments-gaussian sample size");
    for (const char* e : {"lt_moment_1", "z_moment_1"}) {
      const Estimate& x = g.estimate(e);
      v.require(std::abs(x.value - target) <= 3.0 * x.se,
                std::string(e) + "=" + fmt(x.value) + " not within 3 SE of " + fmt(target));
    }
    for (const char* name : {"moments-interval-alpha2", "moments-interval-alpha1.5"}) {
      const CampaignResult& r = find(rs, name);
      for (int n = 1; n <= 4; ++n) {
        check_passes(v, r, "lt_moment_" + std::to_string(n) + "_sandwich");
        check_passes(v, r, "z_moment_" + std::to_string(n) + "_sandwich");
      }
    }
    const CampaignResult& le = find(rs, "lt-estimators");
    const Estimate& a = le.estimate("inverse_subordinator_mean");
    const Estimate& b = le.estimate("occupation_mean");
    v.require(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.se, b.se), "estimators disagree");
    const double secs =
        wall(rs, {"moments-gaussian", "moments-interval-alpha2", "moments-interval-alpha1.5", "lt-estimators"});
    runtime_below(v, secs, 300.0);
    all &= report(5, "moment verification", v, secs);
  }
  {
    Outcome v;
    const CampaignResult& t = find(rs, "tail");
    const CampaignResult& l = find(rs, "lt-tail");
    v.require(t.sample_size == 1000000 && l.sample_size == 1000000, "tail sample size");
    near(v, t, "tail_exponent", 4.0 / 3.0, 0.2);
    near(v, l, "tail_exponent", 2.0, 0.2);
    near(v, t, "tail_constant", tail_constant_b2(gauss, 0.0, 1.0), -0.35);
    near(v, l, "tail_constant", lt_tail_constant(gauss.stable(), 0.0, 1.0), -0.35);
    const double secs = wall(rs, {"tail", "lt-tail"});
    runtime_below(v, secs, 600.0);
    all &= report(6, "tail exponent fits", v, secs);
  }
  {
    Outcome v;
    for (const char* name : {"modulus-alpha2", "modulus-alpha1.5"}) {
      const CampaignResult& r = find(rs, name);
      v.require(r.sample_size == 2000, std::string(name) + " path count");
      near(v, r, "modulus_slope", r.target("modulus_exponent"), 0.1);
    }
    const CampaignResult& mt = find(rs, "max-tail");
    const double r2 = mt.estimate("max_tail_r2").value;
    v.require(r2 >= 0.98, "max-tail R2=" + fmt(r2));
    check_passes(v, find(rs, "lil-global"), "q99_non_trending");
    check_passes(v, find(rs, "lil-local"), "q99_non_trending");
    const double secs =
        wall(rs, {"modulus-alpha2", "modulus-alpha1.5", "max-tail", "lil-global", "lil-local"});
    runtime_below(v, secs, 900.0);
    all &= report(7, "pathwise regularity scaling", v, secs);
  }

  {
    std::printf("running the full suite again with 8 workers...\n");
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    SuiteConfig c8 = base;
    c8.threads = 8;
    const std::vector<CampaignResult> rs8 = run_all(c8);
    const double secs = seconds_since(t0);
    const fs::path root = fs::temp_directory_path() / ("ltfbm-acceptance-" + std::to_string(::getpid()));
    const Json config{{"seed", base.seed}};
    write_reports(root / "w1", "all", rs, config);
    write_reports(root / "w8", "all", rs8, config);
    Outcome v;
    same_reports(v, root / "w1", root / "w8");
    fs::remove_all(root);
    all &= report(8, "reproducibility across runs and worker counts", v, secs);
  }

  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
