#include "msvar/error.hpp"
#include "msvar/indicators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace msvar;

TEST(Indicators, MpcHandExample) {
  const Series c = Series::from_values(2000, {100, 104, 106});
  const Series y = Series::from_values(2000, {200, 210, 212});
  const auto mpc = mpc_series(c, y);
  ASSERT_EQ(mpc.points.size(), 2u);
  EXPECT_EQ(mpc.points[0].year, 2001);
  EXPECT_DOUBLE_EQ(*mpc.points[0].value, 0.4);
  EXPECT_DOUBLE_EQ(*mpc.points[1].value, 1.0);
  const auto impc = impc_series(c, y);
  ASSERT_EQ(impc.points.size(), 1u);
  EXPECT_EQ(impc.points[0].year, 2001);
  EXPECT_DOUBLE_EQ(*impc.points[0].value, 1.0);
}

TEST(Indicators, ZeroIncomeChangeIsFlagged) {
  const Series c = Series::from_values(2000, {1, 2, 3, 4});
  const Series y = Series::from_values(2000, {1, 1, 3, 6});
  const auto mpc = mpc_series(c, y);
  EXPECT_FALSE(mpc.points[0].value.has_value());
  EXPECT_FALSE(mpc.points[0].flag.empty());
  EXPECT_TRUE(mpc.points[1].value.has_value());
  EXPECT_FALSE(mpc.to_series().values[0].has_value());
}

TEST(Indicators, LargeGuardFlagsSmallChanges) {
  const Series c = Series::from_values(0, {0, 1, 2, 3});
  const Series y = Series::from_values(0, {0, 0.001, 10, 20});
  const auto mpc = mpc_series(c, y, 0.01);
  EXPECT_FALSE(mpc.points[0].value.has_value());
  EXPECT_TRUE(mpc.points[1].value.has_value());
}

TEST(Indicators, MisalignedInputsRejected) {
  const Series c = Series::from_values(2000, {1, 2, 3});
  const Series y = Series::from_values(2001, {1, 2, 3});
  EXPECT_THROW(mpc_series(c, y), ValidationError);
}

TEST(Indicators, DiscountFactorIdentity) {
  for (double r : {0.0, 0.01, 0.05, 0.2, 1.5}) {
    const auto d = discount_factor(r);
    EXPECT_NEAR((1.0 + r) * d.beta, 1.0, 4 * std::numeric_limits<double>::epsilon());
  }
  EXPECT_THROW(discount_factor(-1.0), ValidationError);
}

TEST(Indicators, EulerResidualConstantConsumption) {
  const Series c = Series::from_values(2000, {5, 5, 5, 5});
  const auto d = discount_factor(0.05);
  for (const auto& p : euler_residual(c, d.r, d.beta).points) {
    EXPECT_NEAR(*p.value, 0.0, 1e-15);
  }
  // beta = 0.9, r = 0.05: residual is -(ln 1.05 + ln 0.9).
  const auto e = euler_residual(c, 0.05, 0.9);
  EXPECT_EQ(e.points.size(), 3u);
  EXPECT_NEAR(*e.points[0].value, -(std::log(1.05) + std::log(0.9)), 1e-15);
  EXPECT_NEAR(*e.points[0].value, 0.0565703, 1e-6);
}

// Property: IMPC is MPC moved back one year, for arbitrary paths.
TEST(IndicatorProperties, ImpcIsShiftedMpc) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> cv, yv;
    double c = 100, y = 200;
    for (int t = 0; t < 30; ++t) {
      c += n(rng);
      y += n(rng) * 2;
      cv.push_back(c);
      yv.push_back(y);
    }
    const Series cs = Series::from_values(1990, cv);
    const Series ys = Series::from_values(1990, yv);
    const auto mpc = mpc_series(cs, ys);
    const auto impc = impc_series(cs, ys);
    ASSERT_EQ(impc.points.size() + 1, mpc.points.size());
    for (std::size_t i = 0; i < impc.points.size(); ++i) {
      EXPECT_EQ(impc.points[i].year + 1, mpc.points[i + 1].year);
      EXPECT_EQ(impc.points[i].value, mpc.points[i + 1].value);
    }
  }
}
