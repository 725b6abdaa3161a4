#pragma once

#include <array>
#include <optional>

namespace msvar {

enum class Deterministic { none = 0, constant = 1, constant_trend = 2 };

const char* to_string(Deterministic d) noexcept;
std::optional<Deterministic> parse_deterministic(const char* name) noexcept;

/// A p-value that is either a point estimate or a bracketing interval.
struct PValue {
  double value = 1.0;  // point estimate; inside [lower, upper] when bracketed
  double lower = 1.0;
  double upper = 1.0;
  bool bracketed = false;
};

/// Asymptotic p-value of a Dickey-Fuller / Engle-Granger tau statistic for
/// `n_integrated` I(1) series (1 for a unit-root test, 1 + regressors for a
/// cointegration residual test). Smooth response surface up to six series.
/// Beyond six, brackets the statistic between finite-sample critical values
/// (1%, 5%, 10%) and interpolates log(p) linearly in tau inside the bracket.
PValue mackinnon_pvalue(double tau, Deterministic det, int n_integrated, int nobs);

/// Finite-sample critical values at 1%, 5% and 10% (nobs <= 0: asymptotic).
/// Available for n_integrated in 1..12 (1 only, for Deterministic::none).
std::array<double, 3> mackinnon_critical_values(Deterministic det, int n_integrated, int nobs);

constexpr int kMaxSurfaceSeries = 6;
constexpr int kMaxCriticalSeries = 12;

}  // namespace msvar
