#pragma once

#include "msvar/engine.hpp"

#include <cmath>
#include <vector>

namespace testing_support {

// Closed-form pseudo-shocks; mirrored in tests/oracles/statsmodels_reference.py.
inline std::vector<double> shocks(int n, double a = 1.3, double b = 0.7) {
  std::vector<double> e;
  for (int i = 1; i <= n; ++i) {
    const double t = i;
    e.push_back(std::sin(a * t) + 0.5 * std::cos(b * t * t));
  }
  return e;
}

inline std::vector<double> walk(int n) {
  const auto e = shocks(n - 1);
  std::vector<double> y = {0.0};
  for (double v : e) y.push_back(y.back() + v);
  return y;
}

inline std::vector<double> ar(int n, double phi) {
  const auto e = shocks(n, 0.9, 0.31);
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) y[i] = phi * y[i - 1] + e[i];
  return y;
}

inline msvar::ModelDataset dataset_from_columns(const std::vector<std::vector<double>>& cols,
                                                int lag_order = 1) {
  msvar::ModelDataset d;
  const auto T = static_cast<Eigen::Index>(cols.front().size());
  d.Y.resize(T, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (Eigen::Index t = 0; t < T; ++t) d.Y(t, static_cast<Eigen::Index>(j)) = cols[j][static_cast<std::size_t>(t)];
    d.variable_names.push_back("y" + std::to_string(j + 1));
  }
  d.X_exog.resize(T, 0);
  for (Eigen::Index t = 0; t < T; ++t) d.year_index.push_back(static_cast<int>(t) + 1);
  d.lag_order = lag_order;
  d.effective_T = static_cast<int>(T) - lag_order;
  return d;
}

// K-regime VAR(1) on n variables with intercepts spread by `gap` and
// covariance scales that grow with the regime index.
inline msvar::MsVarParameters separated_model(int n, int K, double gap, double stay = 0.95) {
  msvar::MsVarParameters p;
  p.spec.n_regimes = K;
  p.spec.lag_order = 1;
  for (int i = 0; i < n; ++i) p.spec.endogenous.push_back("y" + std::to_string(i + 1));
  for (int k = 0; k < K; ++k) {
    msvar::RegimeParameterSet r;
    r.intercept = msvar::Vector::Constant(n, gap * (k - (K - 1) / 2.0));
    if (n > 1) r.intercept(1) *= -0.5;
    r.lags.push_back(msvar::Matrix::Identity(n, n) * 0.3);
    if (n > 1) r.lags[0](0, 1) = 0.1;
    r.exog.resize(n, 0);
    r.covariance = msvar::Matrix::Identity(n, n) * (0.5 + 0.25 * k);
    if (n > 1) r.covariance(0, 1) = r.covariance(1, 0) = 0.1;
    p.regimes.push_back(r);
  }
  p.transition.P = msvar::Matrix::Constant(K, K, K > 1 ? (1.0 - stay) / (K - 1) : 1.0);
  if (K > 1) p.transition.P.diagonal().setConstant(stay);
  p.initial_probs = msvar::Vector::Constant(K, 1.0 / K);
  return p;
}

}  // namespace testing_support
