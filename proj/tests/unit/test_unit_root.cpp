#include "msvar/error.hpp"
#include "msvar/unit_root.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace msvar;
using testing_support::ar;
using testing_support::walk;

// statsmodels adfuller reference values for the closed-form walk of length 120.
TEST(Adf, FixedLagsMatchReference) {
  const auto y = walk(120);
  const auto c = adf_test(y, Deterministic::constant, 2, LagSelection::fixed);
  EXPECT_NEAR(c.statistic, -3.3314595964923392, 1e-9);
  EXPECT_NEAR(c.p_value.value, 0.013529474667220742, 1e-9);
  EXPECT_EQ(c.observations, 117);
  const auto ct = adf_test(y, Deterministic::constant_trend, 1, LagSelection::fixed);
  EXPECT_NEAR(ct.statistic, -6.236477195848781, 1e-9);
  EXPECT_NEAR(ct.p_value.value, 6.901901242363218e-07, 1e-12);
  const auto n = adf_test(y, Deterministic::none, 0, LagSelection::fixed);
  EXPECT_NEAR(n.statistic, -1.2432650213807448, 1e-9);
  EXPECT_NEAR(n.p_value.value, 0.1964737921316464, 1e-9);
  EXPECT_EQ(n.observations, 119);
}

TEST(Adf, InformationCriteriaMatchReference) {
  const auto y = walk(120);
  const auto bic = adf_test(y, Deterministic::constant, 6, LagSelection::bic);
  EXPECT_EQ(bic.lags_used, 5);
  EXPECT_EQ(bic.observations, 114);
  EXPECT_NEAR(bic.statistic, -3.9693733201776658, 1e-9);
  EXPECT_NEAR(bic.p_value.value, 0.0015796509762817078, 1e-9);
  const auto aic = adf_test(y, Deterministic::constant, 6, LagSelection::aic);
  EXPECT_EQ(aic.lags_used, 6);
  EXPECT_NEAR(aic.statistic, -3.983159108571566, 1e-9);
  const auto bict = adf_test(y, Deterministic::constant_trend, 6, LagSelection::bic);
  EXPECT_EQ(bict.lags_used, 5);
  EXPECT_NEAR(bict.statistic, -3.9885317427257907, 1e-9);
  EXPECT_NEAR(bict.p_value.value, 0.009129296370729002, 1e-9);
}

TEST(Adf, StationaryArRejects) {
  const auto z = ar(150, 0.5);
  const auto r = adf_test(z, Deterministic::constant, 1, LagSelection::fixed);
  EXPECT_NEAR(r.statistic, -14.32662521285958, 1e-8);
  EXPECT_LT(r.p_value.value, 1e-10);
}

TEST(Adf, DegenerateInputsRaise) {
  std::vector<double> constant(50, 3.0);
  EXPECT_THROW(adf_test(constant, Deterministic::constant, 0, LagSelection::fixed), NumericalError);
  std::vector<double> line;
  for (int t = 0; t < 50; ++t) line.push_back(2.0 * t);
  EXPECT_THROW(adf_test(line, Deterministic::constant, 0, LagSelection::fixed), NumericalError);
  EXPECT_THROW(adf_test(std::vector<double>{1, 2, 3}, Deterministic::constant, 2, LagSelection::fixed),
               ValidationError);
}

TEST(Defaults, LagAndBandwidthRules) {
  EXPECT_EQ(default_max_lags(100), 12);
  EXPECT_EQ(default_max_lags(200), 14);
  EXPECT_EQ(default_max_lags(25), 8);
  EXPECT_EQ(default_bandwidth(100), 4);
  EXPECT_EQ(default_bandwidth(200), 4);
  EXPECT_EQ(default_bandwidth(25), 2);
}

TEST(NeweyWest, HandComputed) {
  const std::vector<double> u = {1.0, -1.0, 2.0, 0.5};
  // gamma0 = 6.25/4; gamma1 = (-1 - 2 + 1)/4; weight 1 - 1/2.
  const double expected = 6.25 / 4 + 2 * 0.5 * (-2.0 / 4);
  EXPECT_NEAR(newey_west_variance(u, 1), expected, 1e-15);
  EXPECT_NEAR(newey_west_variance(u, 0), 6.25 / 4, 1e-15);
}

// Independent oracle: Phillips-Perron Z-tau from the normal equations of the
// Dickey-Fuller regression with a constant.
TEST(Pp, MatchesNormalEquationOracle) {
  const auto y = walk(120);
  const int L = 4;
  const std::size_t n = y.size() - 1;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd dy(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) {
    X(static_cast<Eigen::Index>(t), 0) = y[t];
    X(static_cast<Eigen::Index>(t), 1) = 1.0;
    dy(static_cast<Eigen::Index>(t)) = y[t + 1] - y[t];
  }
  const Eigen::MatrixXd XtX_inv = (X.transpose() * X).inverse();
  const Eigen::VectorXd b = XtX_inv * X.transpose() * dy;
  const Eigen::VectorXd u = dy - X * b;
  const double s2 = u.squaredNorm() / static_cast<double>(n - 2);
  const double se = std::sqrt(s2 * XtX_inv(0, 0));
  const double t_stat = b(0) / se;
  double g0 = u.squaredNorm() / n;
  double lr = g0;
  for (int j = 1; j <= L; ++j) {
    double g = 0;
    for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) g += u(static_cast<Eigen::Index>(t)) * u(static_cast<Eigen::Index>(t - j));
    lr += 2.0 * (1.0 - j / (L + 1.0)) * g / n;
  }
  const double z = std::sqrt(g0 / lr) * t_stat - (lr - g0) * n * se / (2.0 * std::sqrt(lr) * std::sqrt(s2));
  const auto r = pp_test(y, Deterministic::constant, L);
  EXPECT_NEAR(r.statistic, z, 1e-9);
  EXPECT_EQ(r.lags_used, L);
}

TEST(Pp, ZeroBandwidthEqualsDickeyFuller) {
  const auto y = walk(80);
  for (auto det : {Deterministic::none, Deterministic::constant, Deterministic::constant_trend}) {
    EXPECT_NEAR(pp_test(y, det, 0).statistic, adf_test(y, det, 0, LagSelection::fixed).statistic, 1e-10);
  }
}

TEST(Fisher, EightSeriesAtFivePercent) {
  std::vector<UnitRootReport> reports(8);
  for (auto& r : reports) r.p_value.value = 0.05;
  const auto c = fisher_combine(reports);
  EXPECT_NEAR(c.statistic, 47.931716376863854, 1e-10);
  EXPECT_EQ(c.degrees_of_freedom, 16);
  EXPECT_NEAR(c.p_value, 4.868713123323417e-05, 1e-15);
  EXPECT_EQ(c.cross_sections, 8);
}

TEST(Fisher, RejectsInvalidPValues) {
  std::vector<UnitRootReport> reports(2);
  reports[0].p_value.value = 0.0;
  reports[1].p_value.value = 0.5;
  EXPECT_THROW(fisher_combine(reports), ValidationError);
}

TEST(ChiSquare, EvenDegreesMatchReference) {
  EXPECT_NEAR(chi_square_sf_even(3.7, 2), 0.1572371663136276, 1e-14);
  EXPECT_NEAR(chi_square_sf_even(25.0, 10), 0.005345505487134069, 1e-14);
}

TEST(Ips, CacheIsDeterministicAndOrderIndependent) {
  const IpsMomentCache a(9, 200);
  const IpsMomentCache b(9, 200);
  const auto m1 = a.get(40, Deterministic::constant);
  b.get(60, Deterministic::constant);
  const auto m2 = b.get(40, Deterministic::constant);
  EXPECT_DOUBLE_EQ(m1.mean, m2.mean);
  EXPECT_DOUBLE_EQ(m1.variance, m2.variance);
  // Dickey-Fuller t with a constant has a null mean near -1.5.
  EXPECT_NEAR(m1.mean, -1.5, 0.2);
  const IpsMomentCache frozen(1, 100, false);
  EXPECT_THROW(frozen.get(40, Deterministic::constant), ValidationError);
}

TEST(Ips, StationaryPanelRejectsRandomWalkPanelDoesNot) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::vector<double>> stationary, walks;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> s = {0.0}, w = {0.0};
    for (int t = 1; t < 100; ++t) {
      s.push_back(0.3 * s.back() + n(rng));
      w.push_back(w.back() + n(rng));
    }
    stationary.push_back(s);
    walks.push_back(w);
  }
  const IpsMomentCache cache(3, 500);
  const auto rs = ips_test(stationary, Deterministic::constant, 0, cache, LagSelection::fixed);
  const auto rw = ips_test(walks, Deterministic::constant, 0, cache, LagSelection::fixed);
  EXPECT_LT(rs.p_value, 0.01);
  EXPECT_GT(rw.p_value, 0.01);
  EXPECT_EQ(rs.cross_sections, 6);
}

TEST(StationarityPipeline, ProducesBothBlocks) {
  TimeSeriesPanel panel;
  panel.country_id = "T";
  panel.series["a"] = Series::from_values(1950, walk(60));
  panel.series["b"] = Series::from_values(1950, ar(60, 0.5));
  const IpsMomentCache cache(3, 200);
  const auto t = stationarity_pipeline(panel, {}, {"a", "b"}, cache);
  ASSERT_EQ(t.level.size(), 5u);
  ASSERT_EQ(t.first_difference.size(), 5u);
  int computed = 0;
  for (const auto& r : t.level) {
    if (r.statistic) {
      ++computed;
      EXPECT_EQ(r.cross_sections, 2);
      EXPECT_GT(*r.p_value, 0.0);
    }
  }
  EXPECT_EQ(computed, 3);
}
