#include "msvar/engine.hpp"

#include "msvar/error.hpp"
#include "msvar/rng.hpp"

#include <cmath>
#include <limits>

namespace msvar {

Design Design::build(const ModelSpec& spec, const ModelDataset& data) {
  data.validate();
  if (data.Y.cols() != static_cast<Eigen::Index>(spec.n()) ||
      data.X_exog.cols() != static_cast<Eigen::Index>(spec.m())) {
    throw ValidationError("dataset columns do not match the model spec");
  }
  if (data.lag_order != spec.lag_order) {
    throw ValidationError("dataset lag order " + std::to_string(data.lag_order) +
                          " differs from spec lag order " + std::to_string(spec.lag_order));
  }
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto m = static_cast<Eigen::Index>(spec.m());
  const Eigen::Index p = spec.lag_order;
  const Eigen::Index T = data.effective_T;

  Design d;
  d.intercept_cols = spec.include_intercept ? 1 : 0;
  d.lag_cols = n * p;
  d.exog_cols = m;
  d.Y = data.Y.bottomRows(T);
  d.Z.resize(T, d.d());
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::Index row = t + p;
    Eigen::Index c = 0;
    if (d.intercept_cols) d.Z(t, c++) = 1.0;
    for (Eigen::Index l = 1; l <= p; ++l) {
      d.Z.block(t, c, 1, n) = data.Y.row(row - l);
      c += n;
    }
    if (m) d.Z.block(t, c, 1, m) = data.X_exog.row(row);
  }
  return d;
}

Matrix stack_coefficients(const ModelSpec& spec, const RegimeParameterSet& regime) {
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto m = static_cast<Eigen::Index>(spec.m());
  const Eigen::Index ic = spec.include_intercept ? 1 : 0;
  Matrix theta(n, ic + n * spec.lag_order + m);
  Eigen::Index c = 0;
  if (ic) theta.col(c++) = regime.intercept;
  for (const auto& A : regime.lags) {
    theta.middleCols(c, n) = A;
    c += n;
  }
  if (m) theta.rightCols(m) = regime.exog;
  return theta;
}

void unstack_coefficients(const ModelSpec& spec, const Matrix& theta, RegimeParameterSet& regime) {
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto m = static_cast<Eigen::Index>(spec.m());
  Eigen::Index c = 0;
  if (spec.include_intercept) {
    regime.intercept = theta.col(c++);
  } else {
    regime.intercept = Vector::Zero(n);
  }
  regime.lags.resize(static_cast<std::size_t>(spec.lag_order));
  for (auto& A : regime.lags) {
    A = theta.middleCols(c, n);
    c += n;
  }
  regime.exog = theta.rightCols(m);
}

Matrix regime_log_densities(const MsVarParameters& params, const Design& design) {
  const auto K = static_cast<Eigen::Index>(params.regimes.size());
  Matrix out(design.T(), K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& regime = params.regimes[static_cast<std::size_t>(k)];
    const Matrix theta = stack_coefficients(params.spec, regime);
    const Matrix resid = design.Y - design.Z * theta.transpose();
    out.col(k) = gaussian_log_density_rows(resid, cholesky_lower(regime.covariance));
  }
  return out;
}

FilterOutput hamilton_filter_from_densities(const Matrix& log_densities, const Matrix& P,
                                            const Vector& initial_distribution) {
  const Eigen::Index T = log_densities.rows();
  const Eigen::Index K = log_densities.cols();
  if (P.rows() != K || initial_distribution.size() != K) {
    throw ValidationError("hamilton_filter: regime dimensions disagree");
  }
  FilterOutput out;
  out.filtered_probs.resize(T, K);
  out.predicted_probs.resize(T, K);
  out.log_densities = log_densities;
  out.log_likelihood = 0.0;

  Vector predicted = initial_distribution;
  Vector joint(K);
  for (Eigen::Index t = 0; t < T; ++t) {
    out.predicted_probs.row(t) = predicted.transpose();
    for (Eigen::Index k = 0; k < K; ++k) {
      joint(k) = predicted(k) > 0.0 ? std::log(predicted(k)) + log_densities(t, k)
                                    : -std::numeric_limits<double>::infinity();
    }
    const double norm = log_sum_exp(joint);
    if (!std::isfinite(norm)) {
      throw NumericalError("hamilton_filter: every regime density vanishes at period " +
                           std::to_string(t));
    }
    out.log_likelihood += norm;
    const Vector filtered = (joint.array() - norm).exp().matrix();
    out.filtered_probs.row(t) = filtered.transpose();
    predicted = P.transpose() * filtered;
  }
  return out;
}

FilterOutput hamilton_filter(const MsVarParameters& params, const ModelDataset& data,
                             const Vector& initial_distribution) {
  params.validate();
  const Design design = Design::build(params.spec, data);
  return hamilton_filter_from_densities(regime_log_densities(params, design), params.transition.P,
                                        initial_distribution);
}

FilterOutput hamilton_filter(const MsVarParameters& params, const ModelDataset& data) {
  return hamilton_filter(params, data, params.initial_probs);
}

SmootherOutput kim_smoother(const FilterOutput& filter, const Matrix& P) {
  constexpr double kFloor = 1e-300;
  const Eigen::Index T = filter.filtered_probs.rows();
  const Eigen::Index K = filter.filtered_probs.cols();
  SmootherOutput out;
  out.smoothed_probs.resize(T, K);
  if (T == 0) return out;
  out.pairwise_probs.resize(static_cast<std::size_t>(std::max<Eigen::Index>(T - 1, 0)));
  out.smoothed_probs.row(T - 1) = filter.filtered_probs.row(T - 1);

  Vector ratio(K);
  bool floored = false;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index j = 0; j < K; ++j) {
      double pred = filter.predicted_probs(t + 1, j);
      if (pred < kFloor) {
        if (out.smoothed_probs(t + 1, j) > 0.0) floored = true;
        pred = kFloor;
      }
      ratio(j) = out.smoothed_probs(t + 1, j) / pred;
    }
    Matrix& pair = out.pairwise_probs[static_cast<std::size_t>(t)];
    pair = filter.filtered_probs.row(t).transpose().asDiagonal() * P * ratio.asDiagonal();
    out.smoothed_probs.row(t) = pair.rowwise().sum().transpose();
  }
  if (floored) {
    out.warnings.emplace_back("kim_smoother: predicted probability floored at 1e-300");
  }
  return out;
}

double loglikelihood(const MsVarParameters& params, const ModelDataset& data) {
  return hamilton_filter(params, data).log_likelihood;
}

namespace {

int draw_categorical(const Eigen::Ref<const Vector>& probs, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    cum += probs(k);
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size() - 1);
}

}  // namespace

SimulationResult simulate(const MsVarParameters& params, int T, const Matrix& exog_path,
                          std::uint64_t seed, int first_year) {
  params.validate();
  const auto& spec = params.spec;
  const int p = spec.lag_order;
  if (T <= p) throw ValidationError("simulate: T must exceed the lag order");
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto m = static_cast<Eigen::Index>(spec.m());
  if (exog_path.rows() != T || exog_path.cols() != m) {
    throw ValidationError("simulate: exogenous path must be T x m");
  }

  std::vector<Matrix> chol;
  for (const auto& r : params.regimes) chol.push_back(cholesky_lower(r.covariance));

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto shock = [&](int k) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    return Vector(chol[static_cast<std::size_t>(k)] * z);
  };

  SimulationResult out;
  auto& data = out.data;
  data.Y.resize(T, n);
  data.X_exog = exog_path;
  data.variable_names = spec.endogenous;
  data.exog_names = spec.exogenous;
  data.lag_order = p;
  data.effective_T = T - p;
  for (int t = 0; t < T; ++t) data.year_index.push_back(first_year + t);

  int s = draw_categorical(params.initial_probs, rng);
  for (int t = 0; t < T; ++t) {
    if (t > p) s = draw_categorical(params.transition.P.row(s).transpose(), rng);
    const auto& r = params.regimes[static_cast<std::size_t>(s)];
    Vector y = r.exog * exog_path.row(t).transpose() + shock(s);
    if (spec.include_intercept) y += r.intercept;
    if (t >= p) {
      for (int l = 1; l <= p; ++l) y += r.lags[static_cast<std::size_t>(l - 1)] * data.Y.row(t - l).transpose();
      out.regime_path.push_back(s);
    }
    data.Y.row(t) = y.transpose();
  }
  return out;
}

}  // namespace msvar
