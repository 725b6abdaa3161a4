#include "msvar/model.hpp"

#include "msvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace msvar {

bool SwitchingMask::any_switching() const {
  return intercept == BlockMode::switching || lag_matrices == BlockMode::switching ||
         exog_coefficients == BlockMode::switching || covariance == BlockMode::switching;
}

void ModelSpec::validate() const {
  if (endogenous.empty()) throw ValidationError("model spec: no endogenous variables");
  if (lag_order < 1) throw ValidationError("model spec: lag_order must be >= 1");
  if (n_regimes < 1) throw ValidationError("model spec: n_regimes must be >= 1");
  std::set<std::string> names(endogenous.begin(), endogenous.end());
  if (names.size() != endogenous.size()) {
    throw ValidationError("model spec: duplicate endogenous variable name");
  }
  for (const auto& x : exogenous) {
    if (names.count(x)) throw ValidationError("model spec: '" + x + "' is both endogenous and exogenous");
  }
  if (std::set<std::string>(exogenous.begin(), exogenous.end()).size() != exogenous.size()) {
    throw ValidationError("model spec: duplicate exogenous variable name");
  }
  if (n_regimes > 1 && !switching.any_switching()) {
    throw ValidationError("model spec: at least one block must switch when n_regimes > 1");
  }
  if (!identification_ordering.empty()) {
    if (identification_ordering.size() != endogenous.size() ||
        std::set<std::string>(identification_ordering.begin(), identification_ordering.end()) !=
            names) {
      throw ValidationError(
          "model spec: identification_ordering must be a permutation of the endogenous variables");
    }
  }
}

std::vector<int> ModelSpec::ordering_indices() const {
  std::vector<int> idx;
  if (identification_ordering.empty()) {
    for (std::size_t i = 0; i < endogenous.size(); ++i) idx.push_back(static_cast<int>(i));
    return idx;
  }
  for (const auto& name : identification_ordering) {
    auto it = std::find(endogenous.begin(), endogenous.end(), name);
    if (it == endogenous.end()) {
      throw ValidationError("identification ordering names unknown variable '" + name + "'");
    }
    idx.push_back(static_cast<int>(it - endogenous.begin()));
  }
  return idx;
}

void RegimeParameterSet::validate(const ModelSpec& spec) const {
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto m = static_cast<Eigen::Index>(spec.m());
  if (intercept.size() != n) throw ValidationError("regime parameters: intercept has wrong length");
  if (static_cast<int>(lags.size()) != spec.lag_order) {
    throw ValidationError("regime parameters: expected " + std::to_string(spec.lag_order) +
                          " lag matrices");
  }
  for (const auto& A : lags) {
    if (A.rows() != n || A.cols() != n) throw ValidationError("regime parameters: lag matrix is not n x n");
  }
  if (exog.rows() != n || exog.cols() != m) {
    throw ValidationError("regime parameters: exogenous coefficient matrix is not n x m");
  }
  if (covariance.rows() != n || covariance.cols() != n) {
    throw ValidationError("regime parameters: covariance is not n x n");
  }
  if (!covariance.isApprox(covariance.transpose(), 1e-12)) {
    throw ValidationError("regime parameters: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(covariance, Eigen::EigenvaluesOnly);
  if (!covariance.allFinite() || es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("regime parameters: covariance is not positive definite");
  }
}

void TransitionMatrix::validate() const {
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw ValidationError("transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if ((P.row(i).array() < 0.0).any() || (P.row(i).array() > 1.0).any() || !P.row(i).allFinite()) {
      throw ValidationError("transition matrix row " + std::to_string(i) +
                            " has entries outside [0, 1]");
    }
    if (std::abs(P.row(i).sum() - 1.0) > 1e-12) {
      throw ValidationError("transition matrix row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

void MsVarParameters::validate() const {
  spec.validate();
  if (regimes.size() != spec.K()) {
    throw ValidationError("parameters: expected " + std::to_string(spec.K()) + " regimes, got " +
                          std::to_string(regimes.size()));
  }
  for (const auto& r : regimes) r.validate(spec);
  transition.validate();
  if (transition.P.rows() != static_cast<Eigen::Index>(spec.K())) {
    throw ValidationError("parameters: transition matrix dimension does not match n_regimes");
  }
  if (initial_probs.size() != static_cast<Eigen::Index>(spec.K()) ||
      (initial_probs.array() < 0.0).any() || std::abs(initial_probs.sum() - 1.0) > 1e-10) {
    throw ValidationError("parameters: initial_probs must be a probability vector of length K");
  }
}

MsVarParameters MsVarParameters::permuted(const std::vector<int>& order) const {
  const auto K = static_cast<Eigen::Index>(order.size());
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (Eigen::Index r = 0; r < K; ++r) {
    if (K != static_cast<Eigen::Index>(regimes.size()) || sorted[static_cast<std::size_t>(r)] != r) {
      throw ValidationError("permuted: order is not a permutation of the regime labels");
    }
  }
  MsVarParameters out = *this;
  for (Eigen::Index r = 0; r < K; ++r) {
    out.regimes[static_cast<std::size_t>(r)] = regimes[static_cast<std::size_t>(order[r])];
    out.initial_probs(r) = initial_probs(order[r]);
    for (Eigen::Index c = 0; c < K; ++c) {
      out.transition.P(r, c) = transition.P(order[r], order[c]);
    }
  }
  return out;
}

std::vector<int> ModelDataset::effective_years() const {
  if (static_cast<int>(year_index.size()) <= lag_order) return {};
  return {year_index.begin() + lag_order, year_index.end()};
}

void ModelDataset::validate() const {
  if (Y.rows() != static_cast<Eigen::Index>(year_index.size())) {
    throw ValidationError("dataset: year index length does not match rows of Y");
  }
  if (X_exog.rows() != Y.rows()) throw ValidationError("dataset: X_exog and Y row counts differ");
  if (Y.cols() != static_cast<Eigen::Index>(variable_names.size()) ||
      X_exog.cols() != static_cast<Eigen::Index>(exog_names.size())) {
    throw ValidationError("dataset: column names do not match matrix widths");
  }
  if (effective_T != Y.rows() - lag_order || effective_T < 1) {
    throw ValidationError("dataset: effective_T inconsistent with rows and lag order");
  }
  if (!Y.allFinite() || !X_exog.allFinite()) {
    throw ValidationError("dataset: contains non-finite values");
  }
}

}  // namespace msvar
