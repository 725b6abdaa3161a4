#pragma once

#include "msvar/engine.hpp"

#include <string>

namespace bench {

// Three-regime VAR(1) with switching intercepts and covariances.
inline msvar::MsVarParameters three_regime_model(int n) {
  msvar::MsVarParameters p;
  p.spec.n_regimes = 3;
  p.spec.lag_order = 1;
  for (int i = 0; i < n; ++i) p.spec.endogenous.push_back("y" + std::to_string(i));
  const double level[3] = {-3.0, 0.0, 3.0};
  const double scale[3] = {0.5, 1.0, 1.5};
  for (int k = 0; k < 3; ++k) {
    msvar::RegimeParameterSet r;
    r.intercept = msvar::Vector::Constant(n, level[k]);
    r.lags.push_back(0.3 * msvar::Matrix::Identity(n, n));
    r.exog.resize(n, 0);
    r.covariance = scale[k] * msvar::Matrix::Identity(n, n);
    p.regimes.push_back(r);
  }
  p.transition.P.resize(3, 3);
  p.transition.P << 0.9, 0.05, 0.05, 0.05, 0.9, 0.05, 0.05, 0.05, 0.9;
  p.initial_probs = msvar::Vector::Constant(3, 1.0 / 3.0);
  return p;
}

inline msvar::ModelDataset simulated(int n, int T, std::uint64_t seed) {
  const auto p = three_regime_model(n);
  return msvar::simulate(p, T + 1, msvar::Matrix(T + 1, 0), seed).data;
}

}  // namespace bench
