#include "msvar/cointegration.hpp"

#include "msvar/error.hpp"

#include <cstdio>

namespace msvar {

StaticOlsResult static_ols(const Vector& y, const Matrix& X, bool include_constant,
                           const std::vector<std::string>& names) {
  if (X.rows() != y.size()) throw ValidationError("static_ols: X and y row counts differ");
  const Eigen::Index offset = include_constant ? 1 : 0;
  if (y.size() <= X.cols() + offset + 1) {
    throw ValidationError("static_ols: need more observations than regressors + 1");
  }
  Matrix design(X.rows(), X.cols() + offset);
  if (include_constant) design.col(0).setOnes();
  design.rightCols(X.cols()) = X;

  std::vector<std::string> labels;
  if (include_constant) labels.emplace_back("constant");
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    labels.push_back(static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                                : "regressor " + std::to_string(j));
  }
  auto fit = least_squares(y, design, labels);
  return {std::move(fit.coefficients), std::move(fit.residuals), std::move(fit.standard_errors)};
}

CointegrationReport engle_granger(const Vector& y, const Matrix& X, Deterministic det,
                                  std::string dependent, std::vector<std::string> regressors,
                                  std::optional<int> max_lags) {
  if (y.size() < 20) {
    throw ValidationError("engle_granger: " + std::to_string(y.size()) +
                          " observations; at least 20 are required");
  }
  if (X.cols() < 1) throw ValidationError("engle_granger: need at least one regressor");
  if (regressors.empty()) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) regressors.push_back("x" + std::to_string(j + 1));
  }

  Matrix design = X;
  if (det == Deterministic::constant_trend) {
    design.conservativeResize(Eigen::NoChange, X.cols() + 1);
    design.col(X.cols()) = Vector::LinSpaced(y.size(), 1.0, static_cast<double>(y.size()));
  }
  std::vector<std::string> names = regressors;
  if (det == Deterministic::constant_trend) names.emplace_back("trend");
  const auto ols = static_ols(y, design, det != Deterministic::none, names);

  const std::span<const double> resid(ols.residuals.data(), static_cast<std::size_t>(ols.residuals.size()));
  const int lags = max_lags.value_or(std::min(default_max_lags(resid.size()),
                                              static_cast<int>(resid.size()) - 10));
  const auto adf = adf_test(resid, Deterministic::none, std::max(lags, 0), LagSelection::bic);

  CointegrationReport report;
  report.dependent = std::move(dependent);
  report.regressors = std::move(regressors);
  report.deterministic = det;
  report.tau = adf.statistic;
  const int n_integrated = static_cast<int>(X.cols()) + 1;
  report.p_value = mackinnon_pvalue(adf.statistic, det, n_integrated, adf.observations);
  report.lags_used = adf.lags_used;
  report.observations = adf.observations;
  report.residuals = ols.residuals;
  report.ols_coefficients = ols.coefficients;
  report.notes.emplace_back("regressor set: " + report.dependent + " on all listed regressors (assumed)");
  if (report.p_value.bracketed) {
    report.notes.emplace_back("more than " + std::to_string(kMaxSurfaceSeries) +
                              " integrated series: p-value bracketed by critical values");
  }
  return report;
}

std::string classify_cointegration(double p) {
  if (p < 0.01) return "cointegrated at 1%";
  if (p < 0.05) return "cointegrated at 5%";
  if (p < 0.10) return "cointegrated at 10%";
  return "not cointegrated";
}

std::string format_tau_cell(const CointegrationReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "Tau: %.2f p-value: %.2f", r.tau, r.p_value.value);
  return buf;
}

std::vector<CointegrationReport> engle_granger_each_vs_rest(
    const std::vector<std::string>& names, const std::vector<std::vector<double>>& series,
    Deterministic det) {
  if (names.size() != series.size() || names.size() < 2) {
    throw ValidationError("engle_granger_each_vs_rest: need at least two named series");
  }
  const auto T = static_cast<Eigen::Index>(series.front().size());
  for (const auto& s : series) {
    if (static_cast<Eigen::Index>(s.size()) != T) {
      throw ValidationError("engle_granger_each_vs_rest: series lengths differ");
    }
  }
  std::vector<CointegrationReport> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    Vector y = Eigen::Map<const Vector>(series[i].data(), T);
    Matrix X(T, static_cast<Eigen::Index>(names.size() - 1));
    std::vector<std::string> others;
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j == i) continue;
      X.col(c++) = Eigen::Map<const Vector>(series[j].data(), T);
      others.push_back(names[j]);
    }
    out.push_back(engle_granger(y, X, det, names[i], others));
  }
  return out;
}

}  // namespace msvar
