#pragma once

#include "msvar/model.hpp"

#include <string>
#include <vector>

namespace msvar {

struct Episode {
  int regime = 0;
  int start_year = 0;
  int end_year = 0;
  double mean_probability = 0.0;  // mean smoothed probability of `regime` over the episode
};

struct RegimeChronology {
  std::vector<int> years;
  std::vector<int> modal_regime;  // argmax of smoothed probabilities, per period
  std::vector<Episode> episodes;  // maximal runs of identical modal regime
};

RegimeChronology regime_dates(const EstimatedMsVar& model, const std::vector<int>& year_index);
RegimeChronology regime_dates(const EstimatedMsVar& model);

/// Regime index meaning "average over the chain's stationary distribution".
inline constexpr int kErgodicRegime = -1;

struct IrfSurface {
  int regime = 0;  // or kErgodicRegime
  std::string shock_variable;
  std::vector<std::string> variables;       // response columns, original order
  std::vector<std::string> identification;  // Cholesky ordering
  Matrix responses;                         // (H + 1) x n, horizons 0..H
  double shock_size = 0.0;                  // impact of the one-SD shock on its own variable
  bool non_decaying = false;                // companion spectral radius >= 1
};

/// Resolves an ordering argument: empty means the spec's identification
/// ordering, or endogenous order if that is empty too.
std::vector<std::string> resolve_ordering(const ModelSpec& spec,
                                          const std::vector<std::string>& ordering);

/// Lower-triangular Cholesky impact matrix under `ordering`, mapped back to
/// the original variable order. Column j is the impact of shock j.
Matrix impact_matrix(const Matrix& covariance, const std::vector<int>& order);

/// Reduced-form MA coefficients Psi_0..Psi_H of one regime's lag polynomial.
std::vector<Matrix> ma_coefficients(const std::vector<Matrix>& lags, int horizon);

/// Companion-form spectral radius of one regime's lag polynomial.
double companion_spectral_radius(const std::vector<Matrix>& lags);

IrfSurface irf(const MsVarParameters& params, int regime, const std::string& shock_variable,
               int horizon, const std::vector<std::string>& ordering = {});

struct FevdTable {
  int regime = 0;
  std::vector<std::string> variables;       // original order
  std::vector<std::string> identification;  // Cholesky ordering
  /// shares[h - 1](i, j): share of response i's h-step forecast-error variance
  /// due to shock j, for h = 1..H. Rows sum to one.
  std::vector<Matrix> shares;
  Matrix standard_error;  // H x n forecast standard errors
};

FevdTable fevd(const MsVarParameters& params, int regime, int horizon,
               const std::vector<std::string>& ordering = {});

/// Half-even rounding to `decimals` places, trailing zeros dropped.
std::string display_number(double value, int decimals = 4);

struct ComparisonTable {
  std::string corner;                    // header of the label column
  std::vector<std::string> columns;
  std::vector<std::string> row_labels;
  Matrix values;                         // NaN where a coefficient is unavailable
};

struct HouseholdVariables {
  std::string consumption = "hc";
  std::string income = "hdi";
  std::string impc = "impc";
  std::string mpc = "mpc";

  std::vector<std::string> in_order() const { return {consumption, income, impc, mpc}; }
};

/// Regime-specific coefficients of `dummy` in the household equations; one
/// row per (model, regime).
ComparisonTable covid_shock_table(const std::vector<EstimatedMsVar>& models,
                                  const std::string& dummy = "covid",
                                  const HouseholdVariables& household = {});

/// First-lag coefficient of each fiscal variable in each household equation;
/// one row per fiscal variable, one column group per model.
ComparisonTable fiscal_impact_table(const std::vector<EstimatedMsVar>& models,
                                    const std::vector<std::string>& fiscal = {"cgd", "exp", "rev", "sub"},
                                    const HouseholdVariables& household = {});

}  // namespace msvar
