#pragma once

#include "msvar/model.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace msvar {

/// Annual series with an explicit missing-value flag per year.
struct Series {
  std::vector<int> years;                     // strictly increasing
  std::vector<std::optional<double>> values;  // nullopt == missing

  std::size_t size() const { return years.size(); }
  bool complete() const;
  std::size_t missing_count() const;
  /// Values as plain doubles; throws ValidationError on any missing entry.
  std::vector<double> dense(const std::string& name = "series") const;
  std::optional<double> at_year(int year) const;

  static Series from_values(int first_year, const std::vector<double>& values);

  friend bool operator==(const Series&, const Series&) = default;
};

struct TimeSeriesPanel {
  std::string country_id;
  std::map<std::string, Series> series;

  const Series& get(const std::string& name) const;
  std::vector<std::string> names() const;
};

enum class CsvLayout { long_format, wide_format };

/// Column mapping for CSV input.
///
/// Long format: one observation per row with country, series, year and value
/// columns. Wide format: a year column, an optional country column, and one
/// column per series; every other header becomes a series name.
struct CsvSchema {
  CsvLayout layout = CsvLayout::long_format;
  std::string country_column = "country";
  std::string series_column = "series";
  std::string year_column = "year";
  std::string value_column = "value";
  std::string default_country = "default";  // wide format without a country column
};

/// Leading lines starting with "#" are skipped. One panel per country, sorted
/// by country id; series within a panel are aligned onto the union of their
/// years.
std::vector<TimeSeriesPanel> load_panel(std::istream& csv, const CsvSchema& schema = {});

Series interpolate_missing(const Series& s);
Series difference(const Series& s, int order = 1);
Series deflate(const Series& s, const Series& deflator);
Series gdp_share(const Series& s, const Series& gdp);
Series lag(const Series& s, int k = 1);

struct DifferenceStep { int order = 1; };
struct DeflateStep { std::string deflator; };
struct GdpShareStep { std::string gdp; };
struct InterpolateStep {};
struct LagStep { int k = 1; };

using TransformStep = std::variant<DifferenceStep, DeflateStep, GdpShareStep, InterpolateStep, LagStep>;

/// Ordered transform steps per named series. Deflator and GDP references
/// always resolve against the untransformed input panel.
struct SeriesTransformPlan {
  std::map<std::string, std::vector<TransformStep>> steps;

  void validate() const;
  /// Largest total differencing order applied to any of `names`.
  int differencing_order(const std::vector<std::string>& names) const;
};

TimeSeriesPanel apply_plan(const TimeSeriesPanel& panel, const SeriesTransformPlan& plan);

struct DummyWindow {
  std::string name = "covid";
  int first_year = 2020;
  int last_year = 2022;
};

/// Transforms the panel, aligns the requested series on their common years,
/// and constructs the shock dummy when it is not itself a panel series.
ModelDataset build_dataset(const TimeSeriesPanel& panel, const SeriesTransformPlan& plan,
                           const ModelSpec& spec, const DummyWindow& dummy = {});

void write_dataset_csv(std::ostream& out, const ModelDataset& data);

}  // namespace msvar
