#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ltfbm/growth.hpp"

using namespace ltfbm;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(Series, ExponentialSums) {
  const SeriesSum s1 = series_log_sum(exp_oracle(), 1.0, 1e-15);
  EXPECT_NEAR(s1.log_sum, 1.0, 1e-12);
  const SeriesSum s10 = series_log_sum(exp_oracle(), 10.0, 1e-15);
  EXPECT_NEAR(s10.log_sum, 10.0, 1e-10);
  EXPECT_GT(s10.truncation_index, s1.truncation_index);
  EXPECT_NEAR(series_log_sum(exp_square_oracle(), 3.0, 1e-15).log_sum, 9.0, 1e-10);
}

TEST(Series, GeometricRadius) {
  CoefficientOracle geo{[](std::size_t) -> std::optional<double> { return 0.0; },
                        SupportPattern::all, 1.0, "geometric"};
  EXPECT_NEAR(series_log_sum(geo, 0.5, 1e-14).log_sum, std::log(2.0), 1e-12);
  EXPECT_THROW(series_log_sum(geo, 1.0, 1e-10, 5000), NonConvergence);
  EXPECT_THROW(series_log_sum(geo, 2.0, 1e-10, 5000), NonConvergence);
}

TEST(Series, M1TruncationSelfConsistent) {
  const CoefficientOracle o = m1_oracle(ModelParams(2.0, 0.0, 2.0, 0.25));
  const SeriesSum a = series_log_sum(o, 5.0, 1e-12);
  EXPECT_TRUE(std::isfinite(a.log_sum));
  // summing well past the truncation point changes nothing at the stated tolerance
  double acc = 0.0;
  std::vector<double> terms;
  for (std::size_t p = 1; p <= a.truncation_index + 400; ++p) terms.push_back(*o.log_c(p) + p * std::log(5.0));
  terms.push_back(0.0);
  const double mx = *std::max_element(terms.begin(), terms.end());
  for (double t : terms) acc += std::exp(t - mx);
  EXPECT_LT(std::abs(mx + std::log(acc) - a.log_sum), 1e-11);
}

TEST(Valiron, ExponentialOrderAndType) {
  const OrderEstimate o = valiron_order(exp_oracle(), 400);
  EXPECT_NEAR(o.rho, 1.0, 0.02);
  EXPECT_FALSE(o.diverging);
  const GrowthEstimate g = valiron_type(exp_oracle(), 1.0, 400);
  EXPECT_NEAR(g.type_B, 1.0, 0.02);
  EXPECT_TRUE(g.converged);
  EXPECT_LT(g.oscillation, g.tolerance);
}

TEST(Valiron, ExpSquare) {
  const OrderEstimate o = valiron_order(exp_square_oracle(), 400);
  EXPECT_NEAR(o.rho, 2.0, 0.04);
  const GrowthEstimate g = valiron_type(exp_square_oracle(), o.rho, 400);
  EXPECT_NEAR(g.type_B, 1.0, 0.04);
}

TEST(Valiron, TypeScalingLaw) {
  const GrowthEstimate g1 = valiron_type(exp_square_oracle(), 2.0, 400);
  const GrowthEstimate g2 = valiron_type(scaled_oracle(exp_square_oracle(), 2.0), 2.0, 400);
  EXPECT_LT(rel(g2.type_B, 4.0 * g1.type_B), 1e-10);
}

TEST(Valiron, TooFewSupportPoints) {
  EXPECT_THROW(valiron_order(exp_square_oracle(), 60), ArgumentError);
}

TEST(Valiron, M1OrderAndType) {
  const ModelParams m(2.0, 0.0, 2.0, 0.25);
  const auto [rho1, b] = m1_order_type(m);
  EXPECT_NEAR(rho1, 4.0 / 3.0, 1e-15);
  EXPECT_LT(rel(b, 0.59527539448807480303), 1e-13);
  EXPECT_LT(rel(m1_order_type(ModelParams(1.8, 0.0, 1.0, 0.4)).second, 0.3424347166657627347), 1e-13);
  const OrderEstimate o = valiron_order(m1_oracle(m), 800);
  EXPECT_NEAR(o.rho, rho1, 0.05);
  const GrowthEstimate g = valiron_type(m1_oracle(m), rho1, 800);
  EXPECT_LT(rel(g.type_B, b), 0.03);
}

TEST(Valiron, LacunarySupport) {
  CoefficientOracle o = exp_oracle();
  o.pattern = SupportPattern::lacunary;
  o.lacunary_h = 0.3;
  const auto sup = o.support(400);
  ASSERT_GT(sup.size(), 100U);
  for (std::size_t k = 0; k + 1 < sup.size(); ++k) {
    EXPECT_EQ(sup[k], static_cast<std::size_t>(std::floor((k + 1) / 0.3)));
  }
  EXPECT_LE(support_gap(sup), 1.0 / 0.3 + 1.0);
  const GrowthEstimate g = valiron_growth(o, 400);
  EXPECT_NEAR(g.order_rho, 1.0, 0.02);
  EXPECT_NEAR(g.type_B, 1.0, 0.03);
}

TEST(Analyticity, Classes) {
  const ModelParams m(2.0, 0.0, 2.0, 0.5);
  EXPECT_EQ(analyticity_class(m, 1.0), AnalyticityClass::entire);
  EXPECT_EQ(analyticity_class(m, m.beta_threshold()), AnalyticityClass::finite_abscissa);
  EXPECT_EQ(analyticity_class(m, 1.01 * m.beta_threshold()), AnalyticityClass::nowhere_finite);
  EXPECT_NEAR(m.beta_threshold(), 4.0 / 3.0, 1e-15);
}

TEST(ZMgf, GaussianAnchor) {
  const GrowthEstimate g = z_logmgf_growth(ModelParams(2.0, 0.0, 2.0, 0.5));
  EXPECT_NEAR(g.order_rho, 4.0, 0.05);
  EXPECT_LT(rel(g.type_B, 0.125), 0.03);
  EXPECT_TRUE(g.converged);
}

TEST(ZMgf, ExponentAndGuard) {
  const ModelParams m(1.8, 0.0, 1.0, 0.4);
  const GrowthEstimate g = z_logmgf_growth(m);
  EXPECT_NEAR(g.order_rho, m.mgf_exponent(), 0.05);
  EXPECT_LT(rel(g.type_B, growth_constant_b1(m)), 0.03);
  EXPECT_THROW(z_logmgf_growth(ModelParams(1.5, 0.0, 1.0, 0.8)), DomainError);
}

TEST(GBeta, GaussianAnchor) {
  const ModelParams m(2.0, 0.0, 2.0, 0.5);
  const GrowthEstimate g = g_beta_growth(m, 1.0, 0.0, 1.0);
  EXPECT_NEAR(g.order_rho, 4.0, 0.05);
  EXPECT_LT(rel(g.type_B, 0.125), 0.03);
  const GrowthEstimate g2 = g_beta_growth(m, 1.0, 0.0, 2.0);
  const double factor = std::pow(2.0, 1.0 * 0.5 * 4.0 * 0.5);
  EXPECT_LT(rel(g2.type_B / g.type_B, factor), 0.05);
  EXPECT_THROW(g_beta_growth(m, 4.0 / 3.0, 0.0, 1.0), DomainError);
}

TEST(GBeta, PositiveStartUsesBracketedMoments) {
  const ModelParams m(1.5, 0.0, 1.0, 0.3);
  const EntireGrowth t = b3_and_rho(m, 0.8, 1.0, 2.0);
  const GrowthEstimate g = g_beta_growth(m, 0.8, 1.0, 2.0);
  EXPECT_NEAR(g.order_rho, t.rho, 0.05 * t.rho);
  EXPECT_LT(rel(g.type_B, t.b3), 0.10);
  EXPECT_GE(g.type_uncertainty, 0.0);
}

TEST(GBeta, RhoArithmeticMonotoneInBeta) {
  const ModelParams m(1.7, 0.0, 1.0, 0.6);
  double last = 1.0;
  for (double beta : {1e-3, 0.1, 0.3, 0.6, 0.9}) {
    const double rho = b3_and_rho(m, beta, 0.0, 1.0).rho;
    EXPECT_GT(rho, last);
    last = rho;
  }
  EXPECT_NEAR(b3_and_rho(m, 1e-9, 0.0, 1.0).rho, 1.0, 1e-8);
}

TEST(LtMgf, GaussianAnchor) {
  const StableParams p(2.0, 0.0, 2.0);
  const GrowthEstimate g = lt_mgf_growth(p, 0.0, 1.0);
  EXPECT_NEAR(g.order_rho, 2.0, 0.04);
  EXPECT_LT(rel(g.type_B, 0.5), 0.03);
  EXPECT_LT(rel(lt_mgf_growth(p, 0.0, 3.0).type_B, 1.5), 0.05);
  EXPECT_LT(rel(lt_mgf_growth(p, 1.0, 2.0).type_B, 0.5), 0.10);
}

TEST(GrowthProperties, SupConditionGapAndPmaxInvariance) {
  const ModelParams m(1.6, 0.0, 1.0, 0.35);
  const std::vector<CoefficientOracle> oracles{exp_oracle(), exp_square_oracle(), m1_oracle(m),
                                               g_beta_oracle(m, 0.9, 0.0, 1.0, 1600),
                                               lt_mgf_oracle(m.stable(), 0.0, 2.0, 1600)};
  for (const auto& o : oracles) {
    const GrowthEstimate g = valiron_growth(o, 800);
    EXPECT_TRUE(g.sup_condition) << o.name << " " << g.sup_ratio;
    EXPECT_TRUE(g.converged) << o.name;
    EXPECT_LE(support_gap(o.support(800)), 2.0 + 1e-12) << o.name;
    const GrowthEstimate g2 = valiron_growth(o, 1600);
    EXPECT_LT(rel(g2.order_rho, g.order_rho), 0.01) << o.name;
    EXPECT_LT(rel(g2.type_B, g.type_B), 0.02) << o.name;
  }
}

TEST(GrowthProperties, StirlingResidualIsSublinear) {
  // log c_p - (p/rho) log(e rho B / p) grows slower than any linear function
  const ModelParams m(1.6, 0.0, 1.0, 0.35);
  const auto [rho, b] = m1_order_type(m);
  const CoefficientOracle o = m1_oracle(m);
  std::vector<double> x, y;
  for (std::size_t p = 600; p <= 800; ++p) {
    x.push_back(static_cast<double>(p));
    y.push_back(*o.log_c(p) - p / rho * std::log(std::exp(1.0) * rho * b / p));
  }
  EXPECT_LT(std::abs(line_fit(x, y).coef(1)), 0.01);
}

TEST(GrowthProperties, DirectSumApproachesType) {
  const ModelParams m(2.0, 0.0, 2.0, 0.25);
  const CoefficientOracle o = m1_oracle(m);
  const GrowthEstimate g = valiron_growth(o, 800);
  std::vector<double> ratio;
  for (double r : {20.0, 60.0, 180.0}) {
    ratio.push_back(series_log_sum(o, r, 1e-12, 20000).log_sum / std::pow(r, g.order_rho));
  }
  EXPECT_LT(std::abs(ratio[2] - g.type_B), std::abs(ratio[1] - g.type_B));
  EXPECT_LT(std::abs(ratio[1] - g.type_B), std::abs(ratio[0] - g.type_B));
  EXPECT_LT(rel(ratio[2], g.type_B), 0.05);
}
