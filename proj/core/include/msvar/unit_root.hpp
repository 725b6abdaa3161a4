#pragma once

#include "msvar/mackinnon.hpp"
#include "msvar/timeseries.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace msvar {

enum class UnitRootTest { adf, pp };
enum class LagSelection { fixed, aic, bic };

const char* to_string(UnitRootTest t) noexcept;
const char* to_string(LagSelection s) noexcept;

struct UnitRootReport {
  UnitRootTest test = UnitRootTest::adf;
  Deterministic deterministic = Deterministic::constant;
  double statistic = 0.0;
  PValue p_value;
  int lags_used = 0;     // augmentation lags (ADF) or Bartlett bandwidth (PP)
  int observations = 0;  // effective regression sample size
};

enum class CombinationMethod { fisher_adf, fisher_pp, ips };

const char* to_string(CombinationMethod m) noexcept;

struct CombinedReport {
  CombinationMethod method = CombinationMethod::fisher_adf;
  double statistic = 0.0;
  double p_value = 1.0;
  int cross_sections = 0;
  int degrees_of_freedom = 0;  // Fisher only
  std::vector<UnitRootReport> per_series;

  int total_observations() const;
};

/// floor(12 (T/100)^{1/4})
int default_max_lags(std::size_t T);
/// floor(4 (T/100)^{2/9})
int default_bandwidth(std::size_t T);

/// Augmented Dickey-Fuller test. With LagSelection::fixed, `max_lags` is the
/// augmentation order; otherwise it bounds an information-criterion search on
/// a common sample, and the selected order is refit on its full sample.
UnitRootReport adf_test(std::span<const double> y, Deterministic det, int max_lags,
                        LagSelection selection = LagSelection::bic);

/// Phillips-Perron Z-tau with a Bartlett-kernel Newey-West long-run variance.
UnitRootReport pp_test(std::span<const double> y, Deterministic det,
                       std::optional<int> bandwidth = std::nullopt);

/// Newey-West long-run variance of `u` (sum of squares over n, Bartlett weights).
double newey_west_variance(std::span<const double> u, int bandwidth);

/// Fisher chi-square combination: -2 sum ln p_i with 2N degrees of freedom.
CombinedReport fisher_combine(std::span<const UnitRootReport> reports,
                              CombinationMethod method = CombinationMethod::fisher_adf);

/// Upper-tail probability of a chi-square variable with even degrees of freedom.
double chi_square_sf_even(double x, int dof);

/// Null moments of the Dickey-Fuller t-ratio, estimated by seeded simulation
/// and memoized per (T, deterministic). Concurrent readers share a lock;
/// population takes it exclusively.
class IpsMomentCache {
 public:
  struct Moments {
    double mean = 0.0;
    double variance = 1.0;
  };

  explicit IpsMomentCache(std::uint64_t seed = 20240601, int replications = 2000,
                          bool allow_simulation = true);

  Moments get(int T, Deterministic det) const;
  void insert(int T, Deterministic det, Moments m);
  bool contains(int T, Deterministic det) const;

 private:
  Moments simulate(int T, Deterministic det) const;

  std::uint64_t seed_;
  int replications_;
  bool allow_simulation_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<int, int>, Moments> cache_;
};

/// Im-Pesaran-Shin W statistic from per-series ADF t-ratios.
CombinedReport ips_test(const std::vector<std::vector<double>>& series, Deterministic det,
                        int max_lags, const IpsMomentCache& cache,
                        LagSelection selection = LagSelection::bic);

/// One row of a unit-root summary table; statistic is empty for the pooled
/// tests this library does not compute.
struct StationarityRow {
  std::string method;
  std::optional<double> statistic;
  std::optional<double> p_value;
  int cross_sections = 0;
  int observations = 0;
};

struct StationarityTable {
  std::string country_id;
  std::vector<StationarityRow> level;
  std::vector<StationarityRow> first_difference;
  std::vector<std::string> variables;
};

struct StationarityOptions {
  Deterministic deterministic = Deterministic::constant;
  LagSelection selection = LagSelection::bic;
  std::optional<int> max_lags;   // default_max_lags when empty
  std::optional<int> bandwidth;  // default_bandwidth when empty
  double p_floor = 1e-8;
};

/// Level and first-difference blocks (IPS, Fisher-ADF, Fisher-PP, plus
/// "not computed" rows for LLC and Breitung) over `variables` of the panel
/// after the transform plan.
StationarityTable stationarity_pipeline(const TimeSeriesPanel& panel,
                                        const SeriesTransformPlan& plan,
                                        const std::vector<std::string>& variables,
                                        const IpsMomentCache& cache,
                                        const StationarityOptions& options = {});

}  // namespace msvar
