#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ltfbm/simulate.hpp"
#include "ltfbm/stats.hpp"

using namespace ltfbm;

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

// two-sample Kolmogorov-Smirnov statistic
double ks_stat(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST(Rng, PhiloxKnownAnswer) {
  // Random123 reference vector: counter 0, key 0
  Philox4x32 g(0);
  EXPECT_EQ(g(), 0x6627e8d5U);
  EXPECT_EQ(g(), 0xe169c58dU);
  EXPECT_EQ(g(), 0xbc57ac4cU);
  EXPECT_EQ(g(), 0x9b00dbd8U);
}

TEST(Rng, DeterministicAndSplit) {
  Rng a(42), b(42), c(mix(42, 1));
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  EXPECT_NE(mix(1, 0), mix(1, 1));
  EXPECT_NE(mix(1, 0), mix(0, 1));
  Rng u(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
}

TEST(Stable, SamplerBridge) {
  const SamplerParams sp = sampler_params(StableParams(1.5, 0.4, 2.0), 0.5);
  EXPECT_EQ(sp.alpha, 1.5);
  EXPECT_EQ(sp.skew, -0.4);
  EXPECT_NEAR(std::pow(sp.scale, 1.5), 0.25, 1e-15);
  EXPECT_THROW(sampler_params(StableParams(1.5, 0.0, 1.0), 0.0), ArgumentError);
}

TEST(Stable, GaussianCollapse) {
  const auto x = stable_increments(StableParams(2.0, 0.0, 2.0), 1.0, 1000000, 11);
  const MeanSe ms = mean_se(x);
  EXPECT_LT(std::abs(ms.mean), 4.0 * ms.se);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
  const MeanSe v = mean_se(sq);
  EXPECT_LT(std::abs(v.mean - 1.0), 4.0 * v.se);
}

TEST(Stable, CharacteristicFunction) {
  for (double nu : {0.0, 0.5, -0.8}) {
    StableParams p(1.5, nu, 1.3);
    const double dt = 0.7;
    const auto x = stable_increments(p, dt, 400000, 5);
    for (double xi : {0.5, 1.0, 2.0}) {
      std::vector<double> c(x.size()), s(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        c[i] = std::cos(xi * x[i]);
        s[i] = std::sin(xi * x[i]);
      }
      const double a = dt * std::pow(xi, 1.5) / p.chi();
      const double b = a * nu * std::tan(std::numbers::pi * 0.75);
      const std::complex<double> phi = std::exp(std::complex<double>(-a, -b));
      const MeanSe mc = mean_se(c), ms = mean_se(s);
      EXPECT_LT(std::abs(mc.mean - phi.real()), 4.0 * mc.se) << nu << " " << xi;
      EXPECT_LT(std::abs(ms.mean - phi.imag()), 4.0 * ms.se) << nu << " " << xi;
    }
  }
}

TEST(Stable, SymmetricMedian) {
  auto x = stable_increments(StableParams(1.5, 0.0, 1.0), 1.0, 1000000, 9);
  // median of a symmetric law: the count of positives is Binomial(n, 1/2)
  const double pos = static_cast<double>(std::count_if(x.begin(), x.end(), [](double v) { return v > 0; }));
  EXPECT_LT(std::abs(pos - 500000.0), 4.0 * 500.0);
}

TEST(Stable, PathStationaryAndSelfSimilar) {
  StableParams p(1.5, 0.3, 1.0);
  const GridPath path = stable_path(p, 0.01, 20000, 17);
  EXPECT_EQ(path[0], 0.0);
  std::vector<double> first, second;
  for (std::size_t i = 0; i < 20000; ++i) {
    (i < 10000 ? first : second).push_back(path[i + 1] - path[i]);
  }
  EXPECT_LT(ks_stat(first, second), 1.63 * std::sqrt(2.0 / 10000.0));

  std::vector<double> x1, x2;
  for (std::size_t r = 0; r < 20000; ++r) {
    const GridPath q = stable_path(p, 0.5, 4, mix(99, r));
    x1.push_back(q[2]);
    x2.push_back(q[4]);
  }
  for (double qq : {0.25, 0.5, 0.75, 0.9}) {
    const MeanSe a = batch_quantile(x2, qq);
    const MeanSe b = batch_quantile(x1, qq);
    const double s = std::pow(2.0, 1.0 / 1.5);
    EXPECT_LT(std::abs(a.mean - s * b.mean), 4.0 * std::hypot(a.se, s * b.se)) << qq;
  }
}

TEST(Stable, PositiveStableLaplace) {
  for (double b : {1.0 / 3.0, 0.5, 0.8}) {
    Rng rng(123);
    std::vector<double> y(200000);
    for (auto& v : y) v = positive_stable(b, rng);
    for (double s : {0.3, 1.0, 3.0}) {
      std::vector<double> e(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) e[i] = std::exp(-s * y[i]);
      const MeanSe ms = mean_se(e);
      EXPECT_LT(std::abs(ms.mean - std::exp(-std::pow(s, b))), 4.0 * ms.se) << b << " " << s;
    }
  }
}

TEST(Fbm, BrownianIncrementsUncorrelated) {
  const GridPath w = fbm_grid(0.5, (1 << 20) + 1, 1e-3, 4);
  std::vector<double> a, b;
  for (std::size_t i = 0; i + 2 < w.size(); ++i) {
    a.push_back(w[i + 1] - w[i]);
    b.push_back(w[i + 2] - w[i + 1]);
  }
  const double rho = covariance(a, b) / covariance(a, a);
  EXPECT_LT(std::abs(rho), 4.0 / std::sqrt(static_cast<double>(a.size())));
  EXPECT_EQ(w[0], 0.0);
}

TEST(Fbm, VarianceAndCovariance) {
  const double h = 0.75;
  FbmGenerator gen(h, 65, 1.0 / 64.0);
  std::vector<double> w25, w50, w100;
  for (std::size_t r = 0; r < 20000; ++r) {
    const GridPath w = gen.sample(mix(7, r));
    w25.push_back(w[16]);
    w50.push_back(w[32]);
    w100.push_back(w[64]);
  }
  for (auto [t, v] : {std::pair{0.25, &w25}, std::pair{0.5, &w50}, std::pair{1.0, &w100}}) {
    std::vector<double> sq;
    for (double x : *v) sq.push_back(x * x);
    const MeanSe ms = mean_se(sq);
    EXPECT_LT(std::abs(ms.mean - std::pow(t, 2 * h)), 4.0 * ms.se) << t;
  }
  std::vector<double> prod;
  for (std::size_t i = 0; i < w50.size(); ++i) prod.push_back(w50[i] * w100[i]);
  const MeanSe pc = mean_se(prod);
  EXPECT_LT(std::abs(pc.mean - fbm_cov(h, 0.5, 1.0)), 4.0 * pc.se);
}

TEST(Fbm, EightPointCovarianceMatrix) {
  const double h = 0.3;
  const std::size_t n = 8;
  const double dt = 0.125;
  FbmGenerator gen(h, n + 1, dt);
  const std::size_t reps = 1000000;
  std::vector<std::vector<double>> col(n, std::vector<double>(reps));
  Rng rng(2024);
  for (std::size_t r = 0; r < reps; ++r) {
    const GridPath w = gen.sample(rng);
    for (std::size_t i = 0; i < n; ++i) col[i][r] = w[i + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::vector<double> p(reps);
      for (std::size_t r = 0; r < reps; ++r) p[r] = col[i][r] * col[j][r];
      const MeanSe ms = mean_se(p);
      EXPECT_LT(std::abs(ms.mean - fbm_cov(h, dt * (i + 1), dt * (j + 1))), 4.0 * ms.se)
          << i << "," << j;
    }
  }
}

TEST(Fbm, FgnAutocovSumsToVariance) {
  // Var W(n dt) = sum_{i,j} gamma(|i-j|)
  const double h = 0.8, dt = 0.1;
  const std::size_t n = 10;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += fgn_autocov(h, dt, i > j ? i - j : j - i);
  EXPECT_NEAR(s, std::pow(n * dt, 2 * h), 1e-12);
}

TEST(LocalTime, OccupationNoVisits) {
  std::vector<double> v(100, 5.0);
  v[50] = -7.0;
  const GridPath l = local_time_occupation(GridPath(0.0, 0.01, v), 0.1);
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_EQ(l[i], 0.0);
  EXPECT_TRUE(l.monotone());
}

TEST(LocalTime, OccupationBrownianMean) {
  StableParams p(2.0, 0.0, 2.0);
  const double dt = 1.0 / 16384.0;
  const double eps = occupation_epsilon(p, dt);
  std::vector<double> l1, l1_wide;
  for (std::size_t r = 0; r < 10000; ++r) {
    const GridPath x = stable_path(p, dt, 16384, mix(31, r));
    const GridPath l = local_time_occupation(x, eps);
    EXPECT_LE(l[0], dt / (2 * eps));
    l1.push_back(l.values().back());
    l1_wide.push_back(local_time_occupation(x, 2.0 * eps).values().back());
  }
  const MeanSe ms = mean_se(l1);
  EXPECT_LT(std::abs(ms.mean - kSqrt2OverPi), 3.0 * ms.se);
  const MeanSe mw = mean_se(l1_wide);
  EXPECT_LT(std::abs(mw.mean / ms.mean - 1.0), 0.02);
}

TEST(LocalTime, InverseSubordinatorMoments) {
  for (double al : {1.5, 2.0}) {
    StableParams p(al, 0.0, 1.4);
    std::vector<double> m1, m2, m3;
    for (std::size_t r = 0; r < 20000; ++r) {
      const GridPath l = local_time_inverse_subordinator(p, 1.0, 1.0 / 256.0, mix(77, r));
      EXPECT_EQ(l[0], 0.0);
      EXPECT_TRUE(std::is_sorted(l.values().begin(), l.values().end()));
      const double v = l.values().back();
      m1.push_back(v);
      m2.push_back(v * v);
      m3.push_back(v * v * v);
    }
    int n = 1;
    for (const auto* m : {&m1, &m2, &m3}) {
      const MeanSe ms = mean_se(*m);
      EXPECT_LT(std::abs(ms.mean - lt_moment_exact(p, n, 1.0)), 3.0 * ms.se) << al << " n=" << n;
      ++n;
    }
  }
  EXPECT_THROW(local_time_inverse_subordinator(StableParams(1.5, 0.2, 1.0), 1.0, 0.01, 1),
               ArgumentError);
}

TEST(LocalTime, ExactMarginalMoments) {
  StableParams p(1.6, 0.7, 0.8);
  Rng rng(5);
  std::vector<double> m1, m2;
  for (int r = 0; r < 200000; ++r) {
    const double v = lt_exact_marginal(p, 2.0, rng);
    m1.push_back(v);
    m2.push_back(v * v);
  }
  const MeanSe a = mean_se(m1), b = mean_se(m2);
  EXPECT_LT(std::abs(a.mean - lt_moment_exact(p, 1, 2.0)), 4.0 * a.se);
  EXPECT_LT(std::abs(b.mean - lt_moment_exact(p, 2, 2.0)), 4.0 * b.se);
}

TEST(LocalTime, MethodsAgree) {
  for (double al : {1.5, 2.0}) {
    StableParams p(al, 0.0, 2.0);
    SimConfig cfg;
    cfg.n_steps = 16384;
    cfg.dt = 1.0 / 16384.0;
    std::vector<double> occ, sub;
    for (std::size_t r = 0; r < 4000; ++r) {
      cfg.local_time_method = LocalTimeMethod::occupation;
      occ.push_back(local_time_path(p, cfg, mix(1, r)).values().back());
      cfg.local_time_method = LocalTimeMethod::inverse_subordinator;
      sub.push_back(local_time_path(p, cfg, mix(2, r)).values().back());
    }
    const MeanSe a = mean_se(occ), b = mean_se(sub);
    EXPECT_LT(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.se, b.se)) << al;
  }
}

TEST(Compose, IdentityClockAndFrozenClock) {
  const GridPath w = fbm_grid(0.6, 101, 0.01, 3);
  std::vector<double> id(101);
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = 0.01 * i;
  const GridPath z = compose(w, GridPath(0.0, 0.01, id, true));
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(z[i], w[i], 1e-12);

  std::vector<double> frozen(101);
  for (std::size_t i = 0; i < frozen.size(); ++i) frozen[i] = std::min(0.01 * i, 0.37);
  const GridPath zf = compose(w, GridPath(0.0, 0.01, frozen, true));
  for (std::size_t i = 38; i < zf.size(); ++i) EXPECT_EQ(zf[i], zf[37]);

  std::vector<double> too_far(101, 0.0);
  too_far.back() = 2.0;
  EXPECT_THROW(compose(w, GridPath(0.0, 0.01, too_far, true)), RangeError);
}

TEST(Compose, BrownianVariance) {
  ModelParams m(2.0, 0.0, 2.0, 0.5);
  SimConfig cfg;
  cfg.n_steps = 1024;
  cfg.dt = 1.0 / 1024.0;
  cfg.seed = 8;
  const SampleMatrix z = sample_z(m, {1.0}, 10000, cfg);
  std::vector<double> sq;
  for (Eigen::Index i = 0; i < z.rows(); ++i) sq.push_back(z(i, 0) * z(i, 0));
  const MeanSe ms = mean_se(sq);
  EXPECT_LT(std::abs(ms.mean - kSqrt2OverPi), 3.0 * ms.se);
}

TEST(SampleZ, ReproducesComposeAndIsDeterministic) {
  ModelParams m(1.5, 0.0, 1.0, 0.4);
  SimConfig cfg;
  cfg.n_steps = 512;
  cfg.dt = 1.0 / 512.0;
  cfg.seed = 77;
  const std::vector<double> times{0.25, 0.5, 1.0};
  const SampleMatrix one = sample_z(m, times, 1, cfg);
  const ZPath zp = z_path(m, cfg, replicate_seed(77, 0));
  for (std::size_t j = 0; j < times.size(); ++j) EXPECT_EQ(one(0, j), zp.z.at(times[j]));

  const SampleMatrix a = sample_z(m, times, 64, cfg);
  const SampleMatrix b = sample_z(m, times, 64, cfg);
  cfg.threads = 8;
  const SampleMatrix c = sample_z(m, times, 64, cfg);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_TRUE((a.array() == c.array()).all());

  cfg.threads = 1;
  cfg.w_method = WMethod::exact_points;
  const SampleMatrix e1 = sample_z(m, times, 32, cfg);
  cfg.threads = 4;
  const SampleMatrix e2 = sample_z(m, times, 32, cfg);
  EXPECT_TRUE((e1.array() == e2.array()).all());
  EXPECT_THROW(sample_z(m, {2.0}, 1, cfg), ArgumentError);
}

TEST(SampleZ, ReplicateStreamsIndependent) {
  ModelParams m(2.0, 0.0, 2.0, 0.5);
  SimConfig cfg;
  cfg.n_steps = 64;
  cfg.dt = 1.0 / 64.0;
  cfg.w_method = WMethod::exact_points;
  const SampleMatrix z = sample_z(m, {1.0}, 40000, cfg);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < 20000; ++i) {
    a.push_back(z(i, 0));
    b.push_back(z(i + 20000, 0));
  }
  const double r = covariance(a, b) / std::sqrt(covariance(a, a) * covariance(b, b));
  EXPECT_LT(std::abs(r), 4.0 / std::sqrt(20000.0));
}

TEST(SampleZ, SelfSimilarQuantiles) {
  ModelParams m(1.5, 0.0, 1.0, 0.5);
  SimConfig cfg;
  cfg.n_steps = 4096;
  cfg.dt = 4.0 / 4096.0;
  cfg.w_method = WMethod::exact_points;
  cfg.seed = 1;
  const SampleMatrix base = sample_z(m, {1.0}, 40000, cfg);
  cfg.seed = 2;
  const SampleMatrix far = sample_z(m, {2.0, 4.0}, 40000, cfg);
  std::vector<double> z1, z2, z4;
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    z1.push_back(base(i, 0));
    z2.push_back(far(i, 0));
    z4.push_back(far(i, 1));
  }
  for (auto [c, zc] : {std::pair{2.0, &z2}, std::pair{4.0, &z4}}) {
    const double s = std::pow(c, m.selfsim_index());
    for (double q : {0.25, 0.5, 0.75, 0.9}) {
      const MeanSe a = batch_quantile(*zc, q), b = batch_quantile(z1, q);
      EXPECT_LT(std::abs(a.mean - s * b.mean), 4.0 * std::hypot(a.se, s * b.se)) << c << " " << q;
    }
  }
}
