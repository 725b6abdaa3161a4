#pragma once

#include "msvar/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msvar {

enum class BlockMode { switching, common };

/// Which coefficient blocks carry a regime index.
struct SwitchingMask {
  BlockMode intercept = BlockMode::switching;
  BlockMode lag_matrices = BlockMode::common;
  BlockMode exog_coefficients = BlockMode::switching;
  BlockMode covariance = BlockMode::switching;

  bool any_switching() const;
  friend bool operator==(const SwitchingMask&, const SwitchingMask&) = default;
};

struct ModelSpec {
  std::vector<std::string> endogenous;
  std::vector<std::string> exogenous;
  int lag_order = 1;
  int n_regimes = 3;
  SwitchingMask switching;
  bool include_intercept = true;
  /// Cholesky ordering for identification; empty means endogenous order.
  std::vector<std::string> identification_ordering;

  std::size_t n() const { return endogenous.size(); }
  std::size_t m() const { return exogenous.size(); }
  std::size_t K() const { return static_cast<std::size_t>(n_regimes); }

  /// Throws ValidationError describing the first violated invariant.
  void validate() const;

  /// identification_ordering resolved to endogenous column indices.
  std::vector<int> ordering_indices() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct RegimeParameterSet {
  Vector intercept;           // n; zeros when the spec has no intercept
  std::vector<Matrix> lags;   // lag_order matrices, n x n
  Matrix exog;                // n x m
  Matrix covariance;          // n x n, symmetric positive definite

  /// Checks shapes against the spec and that covariance is SPD.
  void validate(const ModelSpec& spec) const;
};

struct TransitionMatrix {
  Matrix P;  // P(i, j) = Pr(s_t = j | s_{t-1} = i)

  void validate() const;
  Vector stationary() const { return stationary_distribution(P); }
};

/// Everything needed to evaluate the likelihood or simulate.
struct MsVarParameters {
  ModelSpec spec;
  std::vector<RegimeParameterSet> regimes;
  TransitionMatrix transition;
  Vector initial_probs;  // regime distribution of the first effective period

  void validate() const;

  /// Relabels regimes: new regime r is old regime order[r].
  MsVarParameters permuted(const std::vector<int>& order) const;
};

/// Time-indexed estimation sample. Y and X_exog keep the lag presample rows;
/// effective_T = rows - lag_order.
struct ModelDataset {
  Matrix Y;        // rows x n
  Matrix X_exog;   // rows x m
  std::vector<int> year_index;
  std::vector<std::string> variable_names;
  std::vector<std::string> exog_names;
  int lag_order = 1;
  int effective_T = 0;

  Eigen::Index rows() const { return Y.rows(); }
  /// Years of the effective (post-presample) periods.
  std::vector<int> effective_years() const;
  void validate() const;
};

/// Approximate standard errors of the coefficient blocks for one regime.
struct CoefficientErrors {
  Vector intercept;
  std::vector<Matrix> lags;
  Matrix exog;
};

struct EstimatedMsVar {
  MsVarParameters params;
  Matrix smoothed_probs;  // effective_T x K
  Matrix filtered_probs;  // effective_T x K
  double log_likelihood = 0.0;
  std::vector<double> em_trace;
  bool converged = false;
  int restarts_used = 0;
  int iterations = 0;
  std::vector<int> year_index;  // years of the effective periods
  std::string label;            // usually the country id
  /// Numerical-Hessian standard errors, when requested. Always approximate.
  std::optional<std::vector<CoefficientErrors>> standard_errors;
  std::vector<std::string> warnings;

  const ModelSpec& spec() const { return params.spec; }
};

}  // namespace msvar
