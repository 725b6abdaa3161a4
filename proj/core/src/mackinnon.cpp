#include "msvar/mackinnon.hpp"

#include "msvar/error.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace msvar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

#include "mackinnon_tables.inc"

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double surface_pvalue(double tau, int det, int N) {
  if (tau > kTauMax[det][N - 1]) return 1.0;
  if (tau < kTauMin[det][N - 1]) return 0.0;
  double z = 0.0;
  if (tau <= kTauStar[det][N - 1]) {
    const auto& c = kTauSmallP[det][N - 1];
    z = c[0] + tau * (c[1] + tau * c[2]);
  } else {
    const auto& c = kTauLargeP[det][N - 1];
    z = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
  }
  return normal_cdf(z);
}

double eval_cv(const double (&b)[4], int nobs) {
  if (nobs <= 0) return b[0];
  const double inv = 1.0 / static_cast<double>(nobs);
  return b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
}

}  // namespace

const char* to_string(Deterministic d) noexcept {
  switch (d) {
    case Deterministic::none: return "none";
    case Deterministic::constant: return "constant";
    case Deterministic::constant_trend: return "constant+trend";
  }
  return "constant";
}

std::optional<Deterministic> parse_deterministic(const char* name) noexcept {
  if (std::strcmp(name, "none") == 0) return Deterministic::none;
  if (std::strcmp(name, "constant") == 0) return Deterministic::constant;
  if (std::strcmp(name, "constant+trend") == 0 || std::strcmp(name, "trend") == 0) {
    return Deterministic::constant_trend;
  }
  return std::nullopt;
}

std::array<double, 3> mackinnon_critical_values(Deterministic det, int N, int nobs) {
  if (N < 1 || N > kMaxCriticalSeries || (det == Deterministic::none && N != 1)) {
    throw ValidationError("no critical value surface for " + std::to_string(N) +
                          " integrated series with deterministic '" + to_string(det) + "'");
  }
  std::array<double, 3> cv{};
  for (int level = 0; level < 3; ++level) {
    switch (det) {
      case Deterministic::none: cv[level] = eval_cv(kCrit2010None[level], nobs); break;
      case Deterministic::constant: cv[level] = eval_cv(kCrit2010Constant[N - 1][level], nobs); break;
      case Deterministic::constant_trend: cv[level] = eval_cv(kCrit2010Trend[N - 1][level], nobs); break;
    }
  }
  return cv;
}

PValue mackinnon_pvalue(double tau, Deterministic det, int N, int nobs) {
  if (N < 1) throw ValidationError("mackinnon_pvalue: need at least one integrated series");
  if (std::isnan(tau)) throw NumericalError("mackinnon_pvalue: statistic is NaN");
  PValue p;
  if (N <= kMaxSurfaceSeries) {
    p.value = surface_pvalue(tau, static_cast<int>(det), N);
    p.lower = p.upper = p.value;
    return p;
  }
  // Past the surface: bracket against finite-sample critical values.
  p.bracketed = true;
  if (N > kMaxCriticalSeries || det == Deterministic::none) {
    p.lower = 0.0;
    p.upper = 1.0;
    p.value = 1.0;
    return p;
  }
  const auto cv = mackinnon_critical_values(det, N, nobs);
  static constexpr double levels[3] = {0.01, 0.05, 0.10};
  if (tau <= cv[0]) {
    p.lower = 0.0;
    p.upper = 0.01;
    p.value = 0.01;
  } else if (tau >= cv[2]) {
    p.lower = 0.10;
    p.upper = 1.0;
    p.value = 0.10;
  } else {
    const int i = tau <= cv[1] ? 0 : 1;
    const double w = (tau - cv[i]) / (cv[i + 1] - cv[i]);
    p.lower = levels[i];
    p.upper = levels[i + 1];
    p.value = std::exp((1.0 - w) * std::log(levels[i]) + w * std::log(levels[i + 1]));
  }
  return p;
}

}  // namespace msvar
