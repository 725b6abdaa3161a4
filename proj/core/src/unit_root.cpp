#include "msvar/unit_root.hpp"

#include "msvar/error.hpp"
#include "msvar/linalg.hpp"
#include "msvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace msvar {

namespace {

struct AdfRegression {
  double tau = 0.0;
  double gamma = 0.0;
  double gamma_se = 0.0;
  double rss = 0.0;
  int nobs = 0;
  int nparams = 0;
  Vector residuals;
};

int deterministic_columns(Deterministic det) {
  switch (det) {
    case Deterministic::none: return 0;
    case Deterministic::constant: return 1;
    case Deterministic::constant_trend: return 2;
  }
  return 1;
}

// Regresses dy[i] on y[i], deterministic terms and dy[i-1..i-k] for
// i = start..T-2, where dy[i] = y[i+1] - y[i].
AdfRegression adf_regression(std::span<const double> y, Deterministic det, int k, int start) {
  const int T = static_cast<int>(y.size());
  const int n = T - 1 - start;
  const int ndet = deterministic_columns(det);
  const int cols = 1 + ndet + k;
  if (n <= cols) throw ValidationError("unit-root regression has too few observations");

  Vector target(n);
  Matrix X(n, cols);
  std::vector<std::string> names{"lagged level"};
  if (ndet >= 1) names.emplace_back("constant");
  if (ndet >= 2) names.emplace_back("trend");
  for (int j = 1; j <= k; ++j) names.push_back("difference lag " + std::to_string(j));

  for (int r = 0; r < n; ++r) {
    const int i = start + r;
    target(r) = y[i + 1] - y[i];
    int c = 0;
    X(r, c++) = y[i];
    if (ndet >= 1) X(r, c++) = 1.0;
    if (ndet >= 2) X(r, c++) = static_cast<double>(i + 1);
    for (int j = 1; j <= k; ++j) X(r, c++) = y[i - j + 1] - y[i - j];
  }

  LeastSquaresFit fit;
  try {
    fit = least_squares(target, X, names);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("unit-root regression is singular: ") + e.what());
  }
  const double scale = target.squaredNorm() + X.col(0).squaredNorm();
  if (fit.rss <= 1e-20 * scale) {
    throw NumericalError("unit-root regression fits exactly (zero residual variance)");
  }
  AdfRegression out;
  out.gamma = fit.coefficients(0);
  out.gamma_se = fit.standard_errors(0);
  out.tau = out.gamma / out.gamma_se;
  out.rss = fit.rss;
  out.nobs = n;
  out.nparams = cols;
  out.residuals = std::move(fit.residuals);
  return out;
}

void require_finite(std::span<const double> y) {
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("unit-root test input contains non-finite values");
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

const char* to_string(UnitRootTest t) noexcept { return t == UnitRootTest::adf ? "ADF" : "PP"; }

const char* to_string(LagSelection s) noexcept {
  switch (s) {
    case LagSelection::fixed: return "fixed";
    case LagSelection::aic: return "aic";
    case LagSelection::bic: return "bic";
  }
  return "bic";
}

const char* to_string(CombinationMethod m) noexcept {
  switch (m) {
    case CombinationMethod::fisher_adf: return "ADF - Fisher Chi-square";
    case CombinationMethod::fisher_pp: return "PP - Fisher Chi-square";
    case CombinationMethod::ips: return "Im, Pesaran and Shin W-stat";
  }
  return "";
}

int CombinedReport::total_observations() const {
  int total = 0;
  for (const auto& r : per_series) total += r.observations;
  return total;
}

int default_max_lags(std::size_t T) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
}

int default_bandwidth(std::size_t T) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
}

UnitRootReport adf_test(std::span<const double> y, Deterministic det, int max_lags,
                        LagSelection selection) {
  if (max_lags < 0) throw ValidationError("adf_test: max_lags must be >= 0");
  if (y.size() < static_cast<std::size_t>(max_lags) + 10) {
    throw ValidationError("adf_test: series of length " + std::to_string(y.size()) +
                          " is too short for max_lags " + std::to_string(max_lags));
  }
  require_finite(y);

  int lags = max_lags;
  if (selection != LagSelection::fixed && max_lags > 0) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_lags; ++k) {
      const auto reg = adf_regression(y, det, k, max_lags);
      const double n = reg.nobs;
      const double penalty = selection == LagSelection::aic ? 2.0 : std::log(n);
      const double ic = n * std::log(reg.rss / n) + penalty * reg.nparams;
      if (ic < best) {
        best = ic;
        lags = k;
      }
    }
  }
  const auto reg = adf_regression(y, det, lags, lags);
  UnitRootReport report;
  report.test = UnitRootTest::adf;
  report.deterministic = det;
  report.statistic = reg.tau;
  report.p_value = mackinnon_pvalue(reg.tau, det, 1, reg.nobs);
  report.lags_used = lags;
  report.observations = reg.nobs;
  return report;
}

double newey_west_variance(std::span<const double> u, int bandwidth) {
  const std::size_t n = u.size();
  double lrv = 0.0;
  for (double x : u) lrv += x * x;
  for (int j = 1; j <= bandwidth && static_cast<std::size_t>(j) < n; ++j) {
    double gj = 0.0;
    for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) gj += u[t] * u[t - j];
    lrv += 2.0 * (1.0 - static_cast<double>(j) / (bandwidth + 1.0)) * gj;
  }
  return lrv / static_cast<double>(n);
}

UnitRootReport pp_test(std::span<const double> y, Deterministic det, std::optional<int> bandwidth) {
  if (y.size() < 10) throw ValidationError("pp_test: series too short");
  require_finite(y);
  const int L = bandwidth.value_or(default_bandwidth(y.size()));
  if (L < 0) throw ValidationError("pp_test: bandwidth must be >= 0");

  const auto reg = adf_regression(y, det, 0, 0);
  const double n = reg.nobs;
  const std::span<const double> u(reg.residuals.data(), static_cast<std::size_t>(reg.residuals.size()));
  const double gamma0 = reg.rss / n;
  const double lambda2 = newey_west_variance(u, L);
  const double s = std::sqrt(reg.rss / (n - reg.nparams));
  const double lambda = std::sqrt(lambda2);
  const double z_tau = std::sqrt(gamma0 / lambda2) * reg.tau -
                       (lambda2 - gamma0) * n * reg.gamma_se / (2.0 * lambda * s);

  UnitRootReport report;
  report.test = UnitRootTest::pp;
  report.deterministic = det;
  report.statistic = z_tau;
  report.p_value = mackinnon_pvalue(z_tau, det, 1, reg.nobs);
  report.lags_used = L;
  report.observations = reg.nobs;
  return report;
}

double chi_square_sf_even(double x, int dof) {
  if (dof < 2 || dof % 2 != 0) throw ValidationError("chi_square_sf_even: dof must be even and >= 2");
  if (x <= 0.0) return 1.0;
  // exp(-x/2) sum_{k < dof/2} (x/2)^k / k!, accumulated in log space.
  const double half = 0.5 * x;
  double log_term = -half;
  double sum = std::exp(log_term);
  for (int k = 1; k < dof / 2; ++k) {
    log_term += std::log(half) - std::log(static_cast<double>(k));
    sum += std::exp(log_term);
  }
  return std::clamp(sum, 0.0, 1.0);
}

CombinedReport fisher_combine(std::span<const UnitRootReport> reports, CombinationMethod method) {
  if (reports.empty()) throw ValidationError("fisher_combine: no reports");
  double stat = 0.0;
  for (const auto& r : reports) {
    const double p = r.p_value.value;
    if (!(p > 0.0) || p > 1.0) {
      throw ValidationError("fisher_combine: p-value " + std::to_string(p) +
                            " outside (0, 1]; floor p-values before combining");
    }
    stat -= 2.0 * std::log(p);
  }
  CombinedReport out;
  out.method = method;
  out.statistic = stat;
  out.cross_sections = static_cast<int>(reports.size());
  out.degrees_of_freedom = 2 * out.cross_sections;
  out.p_value = chi_square_sf_even(stat, out.degrees_of_freedom);
  out.per_series.assign(reports.begin(), reports.end());
  return out;
}

IpsMomentCache::IpsMomentCache(std::uint64_t seed, int replications, bool allow_simulation)
    : seed_(seed), replications_(replications), allow_simulation_(allow_simulation) {
  if (replications_ < 2) throw ValidationError("IPS moment cache needs at least 2 replications");
}

bool IpsMomentCache::contains(int T, Deterministic det) const {
  std::shared_lock lock(mutex_);
  return cache_.count({T, static_cast<int>(det)}) > 0;
}

void IpsMomentCache::insert(int T, Deterministic det, Moments m) {
  std::unique_lock lock(mutex_);
  cache_[{T, static_cast<int>(det)}] = m;
}

IpsMomentCache::Moments IpsMomentCache::get(int T, Deterministic det) const {
  const std::pair<int, int> key{T, static_cast<int>(det)};
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  if (!allow_simulation_) {
    throw ValidationError("IPS null moments for T=" + std::to_string(T) +
                          " are not cached and simulation is disabled");
  }
  std::unique_lock lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const Moments m = simulate(T, det);
  cache_.emplace(key, m);
  return m;
}

IpsMomentCache::Moments IpsMomentCache::simulate(int T, Deterministic det) const {
  Rng rng = make_rng(seed_, static_cast<std::uint64_t>(T) * 4 + static_cast<std::uint64_t>(det));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(static_cast<std::size_t>(T));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < replications_; ++r) {
    double level = 0.0;
    for (auto& v : y) {
      level += normal(rng);
      v = level;
    }
    const double t = adf_regression(y, det, 0, 0).tau;
    sum += t;
    sum_sq += t * t;
  }
  const double n = replications_;
  Moments m;
  m.mean = sum / n;
  m.variance = (sum_sq - n * m.mean * m.mean) / (n - 1.0);
  return m;
}

CombinedReport ips_test(const std::vector<std::vector<double>>& series, Deterministic det,
                        int max_lags, const IpsMomentCache& cache, LagSelection selection) {
  if (series.size() < 2) throw ValidationError("ips_test: need at least two series");
  const auto T = series.front().size();
  for (const auto& s : series) {
    if (s.size() != T) throw ValidationError("ips_test: series lengths differ");
  }
  CombinedReport out;
  out.method = CombinationMethod::ips;
  double t_bar = 0.0;
  for (const auto& s : series) {
    out.per_series.push_back(adf_test(s, det, max_lags, selection));
    t_bar += out.per_series.back().statistic;
  }
  const double N = static_cast<double>(series.size());
  t_bar /= N;
  const auto moments = cache.get(static_cast<int>(T), det);
  out.statistic = std::sqrt(N) * (t_bar - moments.mean) / std::sqrt(moments.variance);
  out.p_value = normal_cdf(out.statistic);
  out.cross_sections = static_cast<int>(series.size());
  return out;
}

namespace {

std::vector<StationarityRow> stationarity_block(const std::vector<std::vector<double>>& series,
                                                const IpsMomentCache& cache,
                                                const StationarityOptions& opt) {
  const auto T = series.front().size();
  const int max_lags = opt.max_lags.value_or(default_max_lags(T));
  const int N = static_cast<int>(series.size());

  std::vector<UnitRootReport> adf;
  std::vector<UnitRootReport> pp;
  for (const auto& s : series) {
    adf.push_back(adf_test(s, opt.deterministic, max_lags, opt.selection));
    pp.push_back(pp_test(s, opt.deterministic, opt.bandwidth));
  }
  auto floored = [&](std::vector<UnitRootReport> reports) {
    for (auto& r : reports) r.p_value.value = std::max(r.p_value.value, opt.p_floor);
    return reports;
  };
  const auto fisher_adf = fisher_combine(floored(adf), CombinationMethod::fisher_adf);
  const auto fisher_pp = fisher_combine(floored(pp), CombinationMethod::fisher_pp);

  std::vector<StationarityRow> rows;
  rows.push_back({"Levin, Lin & Chu t*", std::nullopt, std::nullopt, N, 0});
  rows.push_back({"Breitung t-stat", std::nullopt, std::nullopt, N, 0});
  if (N >= 2) {
    const auto ips = ips_test(series, opt.deterministic, max_lags, cache, opt.selection);
    rows.push_back({to_string(CombinationMethod::ips), ips.statistic, ips.p_value, N,
                    ips.total_observations()});
  } else {
    rows.push_back({to_string(CombinationMethod::ips), std::nullopt, std::nullopt, N, 0});
  }
  rows.push_back({to_string(CombinationMethod::fisher_adf), fisher_adf.statistic, fisher_adf.p_value,
                  N, fisher_adf.total_observations()});
  rows.push_back({to_string(CombinationMethod::fisher_pp), fisher_pp.statistic, fisher_pp.p_value, N,
                  fisher_pp.total_observations()});
  return rows;
}

}  // namespace

namespace {

// Values with leading and trailing gaps dropped; interior gaps are an error.
Series edge_trimmed(const Series& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && !s.values[a]) ++a;
  while (b > a && !s.values[b - 1]) --b;
  Series t;
  t.years.assign(s.years.begin() + static_cast<std::ptrdiff_t>(a), s.years.begin() + static_cast<std::ptrdiff_t>(b));
  t.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(a), s.values.begin() + static_cast<std::ptrdiff_t>(b));
  return t;
}

}  // namespace

StationarityTable stationarity_pipeline(const TimeSeriesPanel& panel,
                                        const SeriesTransformPlan& plan,
                                        const std::vector<std::string>& variables,
                                        const IpsMomentCache& cache,
                                        const StationarityOptions& options) {
  if (variables.empty()) throw ValidationError("stationarity_pipeline: no variables");
  const TimeSeriesPanel transformed = apply_plan(panel, plan);
  std::vector<std::vector<double>> level;
  std::vector<std::vector<double>> diff;
  for (const auto& name : variables) {
    const Series& s = transformed.get(name);
    const Series trimmed = edge_trimmed(s);
    level.push_back(trimmed.dense(name));
    diff.push_back(difference(trimmed, 1).dense(name));
  }
  StationarityTable table;
  table.country_id = panel.country_id;
  table.variables = variables;
  table.level = stationarity_block(level, cache, options);
  table.first_difference = stationarity_block(diff, cache, options);
  return table;
}

}  // namespace msvar
