#include "msvar/engine.hpp"
#include "msvar/error.hpp"
#include "msvar/rng.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace msvar;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Exhaustive path enumeration over K^T regime paths.
struct Enumerated {
  Matrix marginals;
  double log_likelihood;
};

Enumerated enumerate_paths(const Matrix& log_dens, const Matrix& P, const Vector& init) {
  const Eigen::Index T = log_dens.rows();
  const Eigen::Index K = log_dens.cols();
  Matrix marg = Matrix::Zero(T, K);
  double total = 0.0;
  Eigen::Index paths = 1;
  for (Eigen::Index t = 0; t < T; ++t) paths *= K;
  std::vector<Eigen::Index> s(static_cast<std::size_t>(T));
  for (Eigen::Index code = 0; code < paths; ++code) {
    Eigen::Index c = code;
    for (Eigen::Index t = 0; t < T; ++t) {
      s[static_cast<std::size_t>(t)] = c % K;
      c /= K;
    }
    double w = init(s[0]) * std::exp(log_dens(0, s[0]));
    for (Eigen::Index t = 1; t < T; ++t) {
      w *= P(s[static_cast<std::size_t>(t - 1)], s[static_cast<std::size_t>(t)]) * std::exp(log_dens(t, s[static_cast<std::size_t>(t)]));
    }
    total += w;
    for (Eigen::Index t = 0; t < T; ++t) marg(t, s[static_cast<std::size_t>(t)]) += w;
  }
  return {marg / total, std::log(total)};
}

MsVarParameters random_two_regime(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::normal_distribution<double> n(0.0, 1.0);
  auto p = testing_support::separated_model(2, 2, 1.0);
  for (auto& r : p.regimes) {
    r.intercept << n(rng), n(rng);
    r.lags[0] << 0.4 * n(rng), 0.2 * n(rng), 0.2 * n(rng), 0.4 * n(rng);
    const double a = 0.3 + u(rng), b = 0.3 + u(rng), c = 0.3 * n(rng);
    r.covariance << a, c * std::sqrt(a * b), c * std::sqrt(a * b), b;
  }
  const double p00 = u(rng), p11 = u(rng);
  p.transition.P << p00, 1 - p00, 1 - p11, p11;
  const double i0 = u(rng);
  p.initial_probs << i0, 1 - i0;
  return p;
}

}  // namespace

TEST(Design, RowsHoldConstantLagsAndExog) {
  auto d = testing_support::dataset_from_columns({{1, 2, 3, 4}, {5, 6, 7, 8}}, 2);
  d.X_exog = Matrix(4, 1);
  d.X_exog << 0, 0, 1, 0;
  d.exog_names = {"dummy"};
  ModelSpec spec;
  spec.endogenous = {"y1", "y2"};
  spec.exogenous = {"dummy"};
  spec.lag_order = 2;
  spec.n_regimes = 2;
  const Design z = Design::build(spec, d);
  ASSERT_EQ(z.T(), 2);
  ASSERT_EQ(z.d(), 6);
  Vector row0(6);
  row0 << 1, 2, 6, 1, 5, 1;
  EXPECT_TRUE(z.Z.row(0).transpose().isApprox(row0));
  EXPECT_DOUBLE_EQ(z.Y(1, 1), 8.0);
}

TEST(Coefficients, StackRoundTrip) {
  const auto p = testing_support::separated_model(3, 2, 2.0);
  const Matrix theta = stack_coefficients(p.spec, p.regimes[1]);
  RegimeParameterSet back;
  unstack_coefficients(p.spec, theta, back);
  EXPECT_TRUE(back.intercept.isApprox(p.regimes[1].intercept));
  EXPECT_TRUE(back.lags[0].isApprox(p.regimes[1].lags[0]));
}

TEST(Densities, MatchClosedFormBivariateNormal) {
  Matrix S(2, 2);
  S << 2.0, 0.6, 0.6, 1.0;
  Matrix e(1, 2);
  e << 0.7, -1.2;
  const double det = S.determinant();
  const double q = (e * S.inverse() * e.transpose())(0, 0);
  const double expected = -std::log(2 * kPi) - 0.5 * std::log(det) - 0.5 * q;
  EXPECT_NEAR(gaussian_log_density_rows(e, cholesky_lower(S))(0), expected, 1e-14);
}

TEST(Smoother, MatchesPathEnumeration) {
  std::mt19937_64 rng(123);
  for (int draw = 0; draw < 20; ++draw) {
    const auto p = random_two_regime(rng);
    const auto sim = simulate(p, 7, Matrix(7, 0), static_cast<std::uint64_t>(draw));
    const auto f = hamilton_filter(p, sim.data);
    const auto s = kim_smoother(f, p.transition.P);
    const auto brute = enumerate_paths(f.log_densities, p.transition.P, p.initial_probs);
    EXPECT_LT((s.smoothed_probs - brute.marginals).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(f.log_likelihood, brute.log_likelihood, 1e-9);
  }
}

TEST(Smoother, PairwiseMarginalsAreConsistent) {
  std::mt19937_64 rng(5);
  const auto p = random_two_regime(rng);
  const auto sim = simulate(p, 40, Matrix(40, 0), 9);
  const auto f = hamilton_filter(p, sim.data);
  const auto s = kim_smoother(f, p.transition.P);
  ASSERT_EQ(s.pairwise_probs.size(), 38u);
  for (std::size_t t = 0; t < s.pairwise_probs.size(); ++t) {
    const auto& M = s.pairwise_probs[t];
    EXPECT_NEAR(M.sum(), 1.0, 1e-12);
    EXPECT_LT((M.rowwise().sum().transpose() - s.smoothed_probs.row(static_cast<Eigen::Index>(t))).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((M.colwise().sum() - s.smoothed_probs.row(static_cast<Eigen::Index>(t) + 1)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// Property: filtered and smoothed rows are distributions.
TEST(FilterProperties, RowsAreProbabilityVectors) {
  for (int seed = 0; seed < 10; ++seed) {
    const auto p = testing_support::separated_model(3, 3, 2.0);
    const auto sim = simulate(p, 120, Matrix(120, 0), static_cast<std::uint64_t>(seed));
    const auto f = hamilton_filter(p, sim.data);
    const auto s = kim_smoother(f, p.transition.P);
    EXPECT_LT((f.filtered_probs.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_LT((s.smoothed_probs.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_GE(s.smoothed_probs.minCoeff(), 0.0);
  }
}

TEST(Filter, OneRegimeLikelihoodIsGaussianSum) {
  auto p = testing_support::separated_model(2, 1, 0.0);
  const auto sim = simulate(p, 50, Matrix(50, 0), 4);
  const Design d = Design::build(p.spec, sim.data);
  const Matrix resid = d.Y - d.Z * stack_coefficients(p.spec, p.regimes[0]).transpose();
  const double direct = gaussian_log_density_rows(resid, cholesky_lower(p.regimes[0].covariance)).sum();
  EXPECT_NEAR(loglikelihood(p, sim.data), direct, 1e-10);
}

TEST(Filter, VanishingDensityNamesPeriod) {
  const Matrix dens = Matrix::Constant(3, 2, -std::numeric_limits<double>::infinity());
  const Matrix P = Matrix::Constant(2, 2, 0.5);
  try {
    hamilton_filter_from_densities(dens, P, Vector::Constant(2, 0.5));
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("period 0"), std::string::npos);
  }
}

TEST(Simulate, DeterministicInSeedAndAbsorbingChain) {
  auto p = testing_support::separated_model(2, 3, 3.0);
  const auto a = simulate(p, 60, Matrix(60, 0), 77);
  const auto b = simulate(p, 60, Matrix(60, 0), 77);
  EXPECT_EQ(a.data.Y, b.data.Y);
  EXPECT_EQ(a.regime_path, b.regime_path);
  EXPECT_EQ(a.regime_path.size(), 59u);
  p.transition.P.setIdentity();
  p.initial_probs << 1, 0, 0;
  const auto c = simulate(p, 60, Matrix(60, 0), 1);
  for (int s : c.regime_path) EXPECT_EQ(s, 0);
}

TEST(Simulate, RejectsBadInputs) {
  const auto p = testing_support::separated_model(2, 2, 1.0);
  EXPECT_THROW(simulate(p, 1, Matrix(1, 0), 0), ValidationError);
  EXPECT_THROW(simulate(p, 10, Matrix(9, 0), 0), ValidationError);
}

TEST(Rng, SplitSeedsDiffer) {
  EXPECT_NE(split_seed(1, 0), split_seed(1, 1));
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
  EXPECT_EQ(split_seed(42, 3), split_seed(42, 3));
}
