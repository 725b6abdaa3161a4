#pragma once

#include "msvar/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msvar {

/// Stacked regression design of a dataset under a spec.
///
/// Row t of `Z` holds [1 | y_{t-1} .. y_{t-p} | x_t] for effective period t
/// (the constant only when the spec includes an intercept); `Y` holds y_t.
struct Design {
  Matrix Y;  // effective_T x n
  Matrix Z;  // effective_T x d
  Eigen::Index intercept_cols = 0;
  Eigen::Index lag_cols = 0;
  Eigen::Index exog_cols = 0;

  Eigen::Index d() const { return intercept_cols + lag_cols + exog_cols; }
  Eigen::Index T() const { return Y.rows(); }

  static Design build(const ModelSpec& spec, const ModelDataset& data);
};

/// n x d coefficient matrix [c | A_1 .. A_p | B] for one regime.
Matrix stack_coefficients(const ModelSpec& spec, const RegimeParameterSet& regime);
void unstack_coefficients(const ModelSpec& spec, const Matrix& theta, RegimeParameterSet& regime);

struct FilterOutput {
  Matrix filtered_probs;   // T x K, Pr(s_t | y_1..y_t)
  Matrix predicted_probs;  // T x K, Pr(s_t | y_1..y_{t-1})
  Matrix log_densities;    // T x K, log f(y_t | s_t, y_{t-1}, ...)
  double log_likelihood = 0.0;
};

/// Hamilton forward recursion in log space. `initial_distribution` is the
/// regime distribution of the first effective period.
FilterOutput hamilton_filter(const MsVarParameters& params, const ModelDataset& data,
                             const Vector& initial_distribution);
FilterOutput hamilton_filter(const MsVarParameters& params, const ModelDataset& data);

/// Filter on precomputed per-period log densities.
FilterOutput hamilton_filter_from_densities(const Matrix& log_densities, const Matrix& P,
                                            const Vector& initial_distribution);

/// T x K log densities of each period under each regime.
Matrix regime_log_densities(const MsVarParameters& params, const Design& design);

struct SmootherOutput {
  Matrix smoothed_probs;              // T x K
  std::vector<Matrix> pairwise_probs; // T-1 matrices, (i, j) = Pr(s_t = i, s_{t+1} = j | all)
  std::vector<std::string> warnings;
};

/// Kim backward recursion.
SmootherOutput kim_smoother(const FilterOutput& filter, const Matrix& P);

double loglikelihood(const MsVarParameters& params, const ModelDataset& data);

struct SimulationResult {
  ModelDataset data;
  std::vector<int> regime_path;  // one entry per effective period
};

/// Draws a regime path from the chain and observations from the
/// regime-conditional Gaussian VAR. The first lag_order rows are presample
/// draws without lag terms. Deterministic in `seed`.
SimulationResult simulate(const MsVarParameters& params, int T, const Matrix& exog_path,
                          std::uint64_t seed, int first_year = 1);

/// automatic cycles through the others across restarts: time_blocks,
/// residual_sorted, level_clusters, then level_clusters with random seeding
/// and perturbed_ols alternately.
enum class InitStrategy { automatic, perturbed_ols, time_blocks, residual_sorted, level_clusters };

struct EmOptions {
  InitStrategy init = InitStrategy::automatic;
  int n_restarts = 10;
  int max_iter = 500;
  double tol = 1e-6;             // relative log-likelihood improvement
  std::uint64_t seed = 0;        // master seed; restart r uses split_seed(seed, r)
  bool standard_errors = false;  // numerical Hessian at the optimum
  bool parallel = true;          // restarts on separate threads
};

/// Per-restart record, kept for diagnostics.
struct RestartSummary {
  InitStrategy strategy = InitStrategy::automatic;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string failure;  // non-empty when the restart threw
};

struct EmDiagnostics {
  std::vector<RestartSummary> restarts;
  int best_restart = -1;
};

/// EM (ECM) estimation with restarts; the best final log-likelihood wins
/// and regimes are relabeled chronologically.
EstimatedMsVar em_fit(const ModelSpec& spec, const ModelDataset& data, const EmOptions& options = {},
                      EmDiagnostics* diagnostics = nullptr);

/// Equation-by-equation least squares for a one-regime spec.
EstimatedMsVar ols_var_fit(const ModelSpec& spec, const ModelDataset& data);

/// Central-difference Hessian of the log-likelihood over the coefficient
/// blocks (covariances and transition probabilities held fixed).
std::vector<CoefficientErrors> approximate_standard_errors(const MsVarParameters& params,
                                                           const ModelDataset& data);

/// Chronological labeling: order of regimes by the earliest period at which
/// each reaches its maximal smoothed probability, ties by covariance
/// determinant. Returns old indices in new-label order.
std::vector<int> chronological_order(const Matrix& smoothed, const MsVarParameters& params);

/// Minimum effective sample implied by the switching parameter count.
int minimum_effective_sample(const ModelSpec& spec);

}  // namespace msvar
