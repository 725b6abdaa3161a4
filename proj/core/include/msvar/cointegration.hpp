#pragma once

#include "msvar/linalg.hpp"
#include "msvar/unit_root.hpp"

#include <string>
#include <vector>

namespace msvar {

struct StaticOlsResult {
  Vector coefficients;  // constant first when included
  Vector residuals;
  Vector standard_errors;
};

/// First-stage static regression of y on X (plus an optional constant),
/// solved by pivoted QR.
StaticOlsResult static_ols(const Vector& y, const Matrix& X, bool include_constant,
                           const std::vector<std::string>& names = {});

struct CointegrationReport {
  std::string dependent;
  std::vector<std::string> regressors;
  Deterministic deterministic = Deterministic::constant;
  double tau = 0.0;
  PValue p_value;
  int lags_used = 0;
  int observations = 0;
  Vector residuals;
  Vector ols_coefficients;
  std::vector<std::string> notes;
};

/// Engle-Granger two-step test: static regression with the requested
/// deterministic terms, then an ADF t-ratio (no deterministic terms, BIC lag
/// choice) on its residuals, scored on the cointegration surface for
/// 1 + cols(X) integrated series.
CointegrationReport engle_granger(const Vector& y, const Matrix& X,
                                  Deterministic det = Deterministic::constant,
                                  std::string dependent = "y",
                                  std::vector<std::string> regressors = {},
                                  std::optional<int> max_lags = std::nullopt);

/// "cointegrated at 1%", "... at 5%", "... at 10%" or "not cointegrated".
std::string classify_cointegration(double p_value);

/// "Tau: %.2f p-value: %.2f"
std::string format_tau_cell(const CointegrationReport& r);

/// One row per variable, each regressed on all the others.
std::vector<CointegrationReport> engle_granger_each_vs_rest(
    const std::vector<std::string>& names, const std::vector<std::vector<double>>& series,
    Deterministic det = Deterministic::constant);

}  // namespace msvar
