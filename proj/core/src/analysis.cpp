#include "msvar/analysis.hpp"

#include "msvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace msvar {

RegimeChronology regime_dates(const EstimatedMsVar& model, const std::vector<int>& year_index) {
  const Matrix& S = model.smoothed_probs;
  if (S.rows() == 0) throw ValidationError("regime_dates: model has no smoothed probabilities");
  if (static_cast<Eigen::Index>(year_index.size()) != S.rows()) {
    throw ValidationError("regime_dates: year_index has " + std::to_string(year_index.size()) +
                          " entries for " + std::to_string(S.rows()) + " periods");
  }
  RegimeChronology out;
  out.years = year_index;
  for (Eigen::Index t = 0; t < S.rows(); ++t) {
    Eigen::Index k = 0;
    S.row(t).maxCoeff(&k);
    out.modal_regime.push_back(static_cast<int>(k));
  }
  std::size_t start = 0;
  for (std::size_t t = 1; t <= out.modal_regime.size(); ++t) {
    if (t < out.modal_regime.size() && out.modal_regime[t] == out.modal_regime[start]) continue;
    Episode e;
    e.regime = out.modal_regime[start];
    e.start_year = year_index[start];
    e.end_year = year_index[t - 1];
    double sum = 0.0;
    for (std::size_t u = start; u < t; ++u) sum += S(static_cast<Eigen::Index>(u), e.regime);
    e.mean_probability = sum / static_cast<double>(t - start);
    out.episodes.push_back(e);
    start = t;
  }
  return out;
}

RegimeChronology regime_dates(const EstimatedMsVar& model) {
  return regime_dates(model, model.year_index);
}

std::vector<std::string> resolve_ordering(const ModelSpec& spec,
                                          const std::vector<std::string>& ordering) {
  std::vector<std::string> out = ordering;
  if (out.empty()) out = spec.identification_ordering;
  if (out.empty()) out = spec.endogenous;
  const std::set<std::string> given(out.begin(), out.end());
  const std::set<std::string> expected(spec.endogenous.begin(), spec.endogenous.end());
  if (out.size() != spec.endogenous.size() || given != expected) {
    throw ValidationError("Cholesky ordering must be a permutation of the endogenous variables");
  }
  return out;
}

namespace {

std::vector<int> ordering_positions(const ModelSpec& spec, const std::vector<std::string>& names) {
  std::vector<int> idx;
  for (const auto& name : names) {
    const auto it = std::find(spec.endogenous.begin(), spec.endogenous.end(), name);
    idx.push_back(static_cast<int>(it - spec.endogenous.begin()));
  }
  return idx;
}

const RegimeParameterSet& regime_at(const MsVarParameters& params, int regime) {
  if (regime < 0 || regime >= static_cast<int>(params.regimes.size())) {
    throw ValidationError("regime index " + std::to_string(regime) + " out of range");
  }
  return params.regimes[static_cast<std::size_t>(regime)];
}

int variable_index(const ModelSpec& spec, const std::string& name) {
  const auto it = std::find(spec.endogenous.begin(), spec.endogenous.end(), name);
  if (it == spec.endogenous.end()) throw ValidationError("unknown endogenous variable '" + name + "'");
  return static_cast<int>(it - spec.endogenous.begin());
}

// Orthogonalized responses Theta_h = Psi_h B0 for h = 0..H.
std::vector<Matrix> orthogonal_responses(const RegimeParameterSet& r, const std::vector<int>& order,
                                         int horizon) {
  const Matrix B0 = impact_matrix(r.covariance, order);
  auto psi = ma_coefficients(r.lags, horizon);
  for (auto& m : psi) m = m * B0;
  return psi;
}

}  // namespace

Matrix impact_matrix(const Matrix& covariance, const std::vector<int>& order) {
  const auto n = static_cast<Eigen::Index>(order.size());
  Matrix S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) S(i, j) = covariance(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  const Matrix L = cholesky_lower(S);
  Matrix B0 = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) B0(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]) = L(i, j);
  }
  return B0;
}

std::vector<Matrix> ma_coefficients(const std::vector<Matrix>& lags, int horizon) {
  if (horizon < 0) throw ValidationError("horizon must be nonnegative");
  if (lags.empty()) throw ValidationError("lag polynomial is empty");
  const Eigen::Index n = lags.front().rows();
  std::vector<Matrix> psi;
  psi.push_back(Matrix::Identity(n, n));
  for (int h = 1; h <= horizon; ++h) {
    Matrix next = Matrix::Zero(n, n);
    for (int l = 1; l <= std::min<int>(h, static_cast<int>(lags.size())); ++l) {
      next += lags[static_cast<std::size_t>(l - 1)] * psi[static_cast<std::size_t>(h - l)];
    }
    psi.push_back(std::move(next));
  }
  return psi;
}

double companion_spectral_radius(const std::vector<Matrix>& lags) {
  const Eigen::Index n = lags.front().rows();
  const auto p = static_cast<Eigen::Index>(lags.size());
  Matrix F = Matrix::Zero(n * p, n * p);
  for (Eigen::Index l = 0; l < p; ++l) F.block(0, l * n, n, n) = lags[static_cast<std::size_t>(l)];
  if (p > 1) F.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
  return spectral_radius(F);
}

IrfSurface irf(const MsVarParameters& params, int regime, const std::string& shock_variable,
               int horizon, const std::vector<std::string>& ordering) {
  params.validate();
  if (horizon < 0) throw ValidationError("irf: horizon must be nonnegative");
  const auto& spec = params.spec;
  const int shock = variable_index(spec, shock_variable);
  IrfSurface out;
  out.regime = regime;
  out.shock_variable = shock_variable;
  out.variables = spec.endogenous;
  out.identification = resolve_ordering(spec, ordering);
  const auto order = ordering_positions(spec, out.identification);

  auto single = [&](int k, bool& explosive, double& size) {
    const auto& r = regime_at(params, k);
    const auto theta = orthogonal_responses(r, order, horizon);
    Matrix resp(horizon + 1, static_cast<Eigen::Index>(spec.n()));
    for (int h = 0; h <= horizon; ++h) resp.row(h) = theta[static_cast<std::size_t>(h)].col(shock).transpose();
    explosive = companion_spectral_radius(r.lags) >= 1.0;
    size = resp(0, shock);
    return resp;
  };

  if (regime == kErgodicRegime) {
    const Vector pi = params.transition.stationary();
    out.responses = Matrix::Zero(horizon + 1, static_cast<Eigen::Index>(spec.n()));
    for (int k = 0; k < static_cast<int>(params.regimes.size()); ++k) {
      bool explosive = false;
      double size = 0.0;
      out.responses += pi(k) * single(k, explosive, size);
      out.shock_size += pi(k) * size;
      if (pi(k) > 0.0 && explosive) out.non_decaying = true;
    }
  } else {
    out.responses = single(regime, out.non_decaying, out.shock_size);
  }
  return out;
}

FevdTable fevd(const MsVarParameters& params, int regime, int horizon,
               const std::vector<std::string>& ordering) {
  params.validate();
  if (horizon < 1) throw ValidationError("fevd: horizon must be at least 1");
  const auto& spec = params.spec;
  FevdTable out;
  out.regime = regime;
  out.variables = spec.endogenous;
  out.identification = resolve_ordering(spec, ordering);
  const auto order = ordering_positions(spec, out.identification);
  const auto theta = orthogonal_responses(regime_at(params, regime), order, horizon - 1);
  const auto n = static_cast<Eigen::Index>(spec.n());

  Matrix cumulative = Matrix::Zero(n, n);
  out.standard_error.resize(horizon, n);
  for (int h = 1; h <= horizon; ++h) {
    cumulative += theta[static_cast<std::size_t>(h - 1)].array().square().matrix();
    const Vector mse = cumulative.rowwise().sum();
    out.standard_error.row(h - 1) = mse.cwiseSqrt().transpose();
    out.shares.push_back(mse.cwiseInverse().asDiagonal() * cumulative);
  }
  return out;
}

std::string display_number(double value, int decimals) {
  if (std::isnan(value)) return "NA";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  const double scale = std::pow(10.0, decimals);
  const double rounded = std::nearbyint(value * scale) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

namespace {

std::optional<int> find_index(const std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<int>(it - names.begin());
}

}  // namespace

ComparisonTable covid_shock_table(const std::vector<EstimatedMsVar>& models, const std::string& dummy,
                                  const HouseholdVariables& household) {
  ComparisonTable table;
  table.corner = "Variable";
  table.columns = household.in_order();
  std::vector<Vector> rows;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& model : models) {
    const auto& spec = model.spec();
    const auto d = find_index(spec.exogenous, dummy);
    for (std::size_t k = 0; k < model.params.regimes.size(); ++k) {
      Vector row = Vector::Constant(4, nan);
      for (Eigen::Index c = 0; c < 4; ++c) {
        const auto i = find_index(spec.endogenous, table.columns[static_cast<std::size_t>(c)]);
        if (d && i) row(c) = model.params.regimes[k].exog(*i, *d);
      }
      rows.push_back(row);
      table.row_labels.push_back(model.label + " (Regime " + std::to_string(k + 1) + ")");
    }
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t r = 0; r < rows.size(); ++r) table.values.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return table;
}

ComparisonTable fiscal_impact_table(const std::vector<EstimatedMsVar>& models,
                                    const std::vector<std::string>& fiscal,
                                    const HouseholdVariables& household) {
  ComparisonTable table;
  table.corner = "Variable";
  table.row_labels = fiscal;
  const auto hh = household.in_order();
  for (const auto& model : models) {
    for (const auto& h : hh) table.columns.push_back(model.label + " - " + h);
  }
  table.values = Matrix::Constant(static_cast<Eigen::Index>(fiscal.size()),
                                  static_cast<Eigen::Index>(table.columns.size()),
                                  std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& spec = models[m].spec();
    const Matrix& A = models[m].params.regimes.front().lags.front();
    for (std::size_t f = 0; f < fiscal.size(); ++f) {
      const auto j = find_index(spec.endogenous, fiscal[f]);
      for (std::size_t c = 0; c < hh.size(); ++c) {
        const auto i = find_index(spec.endogenous, hh[c]);
        if (i && j) table.values(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m * hh.size() + c)) = A(*i, *j);
      }
    }
  }
  return table;
}

}  // namespace msvar
