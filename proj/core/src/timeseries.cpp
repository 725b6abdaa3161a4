#include "msvar/timeseries.hpp"

#include "msvar/error.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace msvar {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// RFC 4180 style record splitter: quoted fields may contain commas, doubled
// quotes and newlines. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(trim(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(trim(field));
  return true;
}

std::optional<double> parse_value(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = cell.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

int parse_year(const std::string& cell, std::size_t row) {
  int year = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), year);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ValidationError("row " + std::to_string(row) + ": year '" + cell +
                          "' is not an integer");
  }
  return year;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("CSV header has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

using ObservationKey = std::tuple<std::string, std::string, int>;

struct RawObservation {
  std::optional<double> value;
  std::size_t row;
};

std::string year_list(const std::vector<int>& years) {
  std::string out;
  for (auto y : years) out += (out.empty() ? "" : ", ") + std::to_string(y);
  return out;
}

// Pairs up two series by year; throws if a year of `s` is absent from `other`.
std::vector<std::optional<double>> matched_values(const Series& s, const Series& other,
                                                  const char* what) {
  std::vector<std::optional<double>> out;
  out.reserve(s.size());
  for (auto year : s.years) {
    auto it = std::lower_bound(other.years.begin(), other.years.end(), year);
    if (it == other.years.end() || *it != year) {
      throw ValidationError(std::string(what) + " series has no entry for year " +
                            std::to_string(year));
    }
    out.push_back(other.values[static_cast<std::size_t>(it - other.years.begin())]);
  }
  return out;
}

Series divide_by(const Series& s, const Series& denom, double scale, const char* what) {
  const auto d = matched_values(s, denom, what);
  Series out{s.years, {}};
  out.values.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (d[i] && *d[i] <= 0.0) {
      throw ValidationError(std::string(what) + " is not strictly positive in year " +
                            std::to_string(s.years[i]));
    }
    if (s.values[i] && d[i]) {
      out.values.push_back(scale * *s.values[i] / *d[i]);
    } else {
      out.values.push_back(std::nullopt);
    }
  }
  return out;
}

Series trim_missing_edges(const Series& s) {
  std::size_t first = 0;
  std::size_t last = s.size();
  while (first < last && !s.values[first]) ++first;
  while (last > first && !s.values[last - 1]) --last;
  return Series{{s.years.begin() + static_cast<std::ptrdiff_t>(first),
                 s.years.begin() + static_cast<std::ptrdiff_t>(last)},
                {s.values.begin() + static_cast<std::ptrdiff_t>(first),
                 s.values.begin() + static_cast<std::ptrdiff_t>(last)}};
}

}  // namespace

bool Series::complete() const { return missing_count() == 0; }

std::size_t Series::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return !v; }));
}

std::vector<double> Series::dense(const std::string& name) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) {
      throw ValidationError(name + " has a missing value in year " + std::to_string(years[i]));
    }
    out.push_back(*values[i]);
  }
  return out;
}

std::optional<double> Series::at_year(int year) const {
  auto it = std::lower_bound(years.begin(), years.end(), year);
  if (it == years.end() || *it != year) return std::nullopt;
  return values[static_cast<std::size_t>(it - years.begin())];
}

Series Series::from_values(int first_year, const std::vector<double>& v) {
  Series s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.years.push_back(first_year + static_cast<int>(i));
    s.values.emplace_back(v[i]);
  }
  return s;
}

const Series& TimeSeriesPanel::get(const std::string& name) const {
  auto it = series.find(name);
  if (it == series.end()) {
    std::string available;
    for (const auto& [k, _] : series) available += (available.empty() ? "" : ", ") + k;
    throw ValidationError("series '" + name + "' not found in panel '" + country_id +
                          "'; available: " + available);
  }
  return it->second;
}

std::vector<std::string> TimeSeriesPanel::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : series) out.push_back(k);
  return out;
}

std::vector<TimeSeriesPanel> load_panel(std::istream& csv, const CsvSchema& schema) {
  // Leading "#" lines carry provenance metadata, not data.
  while (csv.peek() == '#') {
    std::string skipped;
    std::getline(csv, skipped);
  }
  std::vector<std::string> header;
  if (!read_record(csv, header) || (header.size() == 1 && header[0].empty())) {
    throw ValidationError("CSV input is empty");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  std::map<ObservationKey, RawObservation> obs;
  auto insert = [&](std::string country, std::string name, int year, std::optional<double> v,
                    std::size_t row) {
    auto [it, inserted] = obs.emplace(ObservationKey{country, name, year}, RawObservation{v, row});
    if (!inserted) {
      throw ValidationError("row " + std::to_string(row) + ": duplicate observation (" + country +
                            ", " + name + ", " + std::to_string(year) + "), first seen at row " +
                            std::to_string(it->second.row));
    }
  };

  std::vector<std::string> fields;
  std::size_t row = 1;  // header is row 1
  if (schema.layout == CsvLayout::long_format) {
    const auto ci = column_index(header, schema.country_column);
    const auto si = column_index(header, schema.series_column);
    const auto yi = column_index(header, schema.year_column);
    const auto vi = column_index(header, schema.value_column);
    while (read_record(csv, fields)) {
      ++row;
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != header.size()) {
        throw ValidationError("row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
      }
      insert(fields[ci], fields[si], parse_year(fields[yi], row), parse_value(fields[vi]), row);
    }
  } else {
    const auto yi = column_index(header, schema.year_column);
    auto cit = std::find(header.begin(), header.end(), schema.country_column);
    const bool has_country = cit != header.end();
    const auto ci = static_cast<std::size_t>(cit - header.begin());
    while (read_record(csv, fields)) {
      ++row;
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != header.size()) {
        throw ValidationError("row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
      }
      const int year = parse_year(fields[yi], row);
      const std::string country = has_country ? fields[ci] : schema.default_country;
      for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == yi || (has_country && j == ci)) continue;
        insert(country, header[j], year, parse_value(fields[j]), row);
      }
    }
  }
  if (obs.empty()) throw ValidationError("CSV input has a header but no data rows");

  // Group, then align every series of a country on the union of its years.
  std::map<std::string, std::map<std::string, std::map<int, std::optional<double>>>> grouped;
  std::map<std::string, std::set<int>> years_by_country;
  for (const auto& [key, o] : obs) {
    const auto& [country, name, year] = key;
    grouped[country][name][year] = o.value;
    years_by_country[country].insert(year);
  }
  std::vector<TimeSeriesPanel> panels;
  for (const auto& [country, by_name] : grouped) {
    TimeSeriesPanel panel;
    panel.country_id = country;
    const auto& years = years_by_country[country];
    for (const auto& [name, points] : by_name) {
      Series s;
      for (int year : years) {
        s.years.push_back(year);
        auto it = points.find(year);
        s.values.push_back(it == points.end() ? std::nullopt : it->second);
      }
      panel.series.emplace(name, std::move(s));
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

Series interpolate_missing(const Series& s) {
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.values[i]) known.push_back(i);
  }
  if (known.empty()) throw ValidationError("interpolation: series is entirely missing");
  if (!s.values.front()) {
    throw ValidationError("interpolation: leading missing value in year " +
                          std::to_string(s.years.front()));
  }
  if (!s.values.back()) {
    throw ValidationError("interpolation: trailing missing value in year " +
                          std::to_string(s.years.back()));
  }
  if (known.size() < 2 && s.size() > 1) {
    throw ValidationError("interpolation: need at least two observed points");
  }
  Series out = s;
  for (std::size_t k = 0; k + 1 < known.size(); ++k) {
    const std::size_t a = known[k];
    const std::size_t b = known[k + 1];
    const double ya = *s.values[a];
    const double yb = *s.values[b];
    const double span = static_cast<double>(s.years[b] - s.years[a]);
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = static_cast<double>(s.years[i] - s.years[a]) / span;
      out.values[i] = ya + w * (yb - ya);
    }
  }
  return out;
}

Series difference(const Series& s, int order) {
  if (order < 1) throw ValidationError("difference: order must be >= 1");
  if (s.size() <= static_cast<std::size_t>(order)) {
    throw ValidationError("difference: series of length " + std::to_string(s.size()) +
                          " is too short for order " + std::to_string(order));
  }
  std::vector<double> v = s.dense("difference input");
  std::vector<int> years = s.years;
  for (int d = 0; d < order; ++d) {
    for (std::size_t i = v.size() - 1; i > 0; --i) v[i] -= v[i - 1];
    v.erase(v.begin());
    years.erase(years.begin());
  }
  Series out;
  out.years = std::move(years);
  for (double x : v) out.values.emplace_back(x);
  return out;
}

Series deflate(const Series& s, const Series& deflator) {
  return divide_by(s, deflator, 1.0, "deflator");
}

Series gdp_share(const Series& s, const Series& gdp) {
  return divide_by(s, gdp, 100.0, "GDP");
}

Series lag(const Series& s, int k) {
  if (k < 1) throw ValidationError("lag: k must be >= 1");
  if (s.size() <= static_cast<std::size_t>(k)) {
    throw ValidationError("lag: series too short for lag " + std::to_string(k));
  }
  Series out;
  out.years.assign(s.years.begin() + k, s.years.end());
  out.values.assign(s.values.begin(), s.values.end() - k);
  return out;
}

void SeriesTransformPlan::validate() const {
  for (const auto& [name, list] : steps) {
    for (const auto& step : list) {
      if (const auto* d = std::get_if<DifferenceStep>(&step); d && d->order < 1) {
        throw ValidationError("transform plan for '" + name + "': difference order must be >= 1");
      }
      if (const auto* l = std::get_if<LagStep>(&step); l && l->k < 1) {
        throw ValidationError("transform plan for '" + name + "': lag k must be >= 1");
      }
    }
  }
}

int SeriesTransformPlan::differencing_order(const std::vector<std::string>& names) const {
  int best = 0;
  for (const auto& name : names) {
    auto it = steps.find(name);
    if (it == steps.end()) continue;
    int total = 0;
    for (const auto& step : it->second) {
      if (const auto* d = std::get_if<DifferenceStep>(&step)) total += d->order;
    }
    best = std::max(best, total);
  }
  return best;
}

TimeSeriesPanel apply_plan(const TimeSeriesPanel& panel, const SeriesTransformPlan& plan) {
  plan.validate();
  TimeSeriesPanel out = panel;
  for (const auto& [name, list] : plan.steps) {
    if (!panel.series.count(name)) continue;  // build_dataset reports missing names
    Series s = panel.get(name);
    for (const auto& step : list) {
      s = std::visit(
          [&](const auto& st) -> Series {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, DifferenceStep>) {
              return difference(s, st.order);
            } else if constexpr (std::is_same_v<T, DeflateStep>) {
              return deflate(s, panel.get(st.deflator));
            } else if constexpr (std::is_same_v<T, GdpShareStep>) {
              return gdp_share(s, panel.get(st.gdp));
            } else if constexpr (std::is_same_v<T, InterpolateStep>) {
              return interpolate_missing(s);
            } else {
              return lag(s, st.k);
            }
          },
          step);
    }
    out.series[name] = std::move(s);
  }
  return out;
}

ModelDataset build_dataset(const TimeSeriesPanel& panel, const SeriesTransformPlan& plan,
                           const ModelSpec& spec, const DummyWindow& dummy) {
  spec.validate();
  const TimeSeriesPanel transformed = apply_plan(panel, plan);

  std::vector<std::string> contributing = spec.endogenous;
  for (const auto& x : spec.exogenous) {
    if (x == dummy.name && !transformed.series.count(x)) continue;
    contributing.push_back(x);
  }

  std::map<std::string, Series> trimmed;
  std::optional<int> lo, hi;
  for (const auto& name : contributing) {
    Series s = trim_missing_edges(transformed.get(name));
    if (s.size() == 0) {
      throw ValidationError("series '" + name + "' has no observed values after transformation");
    }
    lo = lo ? std::max(*lo, s.years.front()) : s.years.front();
    hi = hi ? std::min(*hi, s.years.back()) : s.years.back();
    trimmed.emplace(name, std::move(s));
  }
  if (!lo || *lo > *hi) throw ValidationError("series share no common years after transformation");

  // Common years: present in every contributing series within [lo, hi].
  std::vector<int> years;
  for (int y : trimmed.begin()->second.years) {
    if (y < *lo || y > *hi) continue;
    bool everywhere = std::all_of(trimmed.begin(), trimmed.end(), [&](const auto& kv) {
      return std::binary_search(kv.second.years.begin(), kv.second.years.end(), y);
    });
    if (everywhere) years.push_back(y);
  }

  ModelDataset data;
  data.variable_names = spec.endogenous;
  data.exog_names = spec.exogenous;
  data.year_index = years;
  data.lag_order = spec.lag_order;
  const auto rows = static_cast<Eigen::Index>(years.size());
  data.Y.resize(rows, static_cast<Eigen::Index>(spec.n()));
  data.X_exog.resize(rows, static_cast<Eigen::Index>(spec.m()));

  auto fill = [&](const std::string& name, auto col) {
    const Series& s = trimmed.at(name);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto v = s.at_year(years[static_cast<std::size_t>(r)]);
      if (!v) {
        throw ValidationError("series '" + name + "' has a missing value in year " +
                              std::to_string(years[static_cast<std::size_t>(r)]) +
                              " after transformation");
      }
      col(r) = *v;
    }
  };
  for (std::size_t j = 0; j < spec.n(); ++j) {
    fill(spec.endogenous[j], data.Y.col(static_cast<Eigen::Index>(j)));
  }
  for (std::size_t j = 0; j < spec.m(); ++j) {
    const auto& name = spec.exogenous[j];
    auto col = data.X_exog.col(static_cast<Eigen::Index>(j));
    if (trimmed.count(name)) {
      fill(name, col);
    } else {
      for (Eigen::Index r = 0; r < rows; ++r) {
        const int y = years[static_cast<std::size_t>(r)];
        col(r) = (y >= dummy.first_year && y <= dummy.last_year) ? 1.0 : 0.0;
      }
    }
  }
  data.effective_T = static_cast<int>(rows) - spec.lag_order;
  if (data.effective_T < 1) {
    throw ValidationError("only " + std::to_string(rows) + " aligned years (" + year_list(years) +
                          "); not enough for lag order " + std::to_string(spec.lag_order));
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const ModelDataset& data) {
  out << "year";
  for (const auto& n : data.variable_names) out << ',' << n;
  for (const auto& n : data.exog_names) out << ',' << n;
  out << '\n';
  std::ostringstream cell;
  cell.precision(17);
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    out << data.year_index[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < data.Y.cols(); ++c) {
      cell.str({});
      cell << data.Y(r, c);
      out << ',' << cell.str();
    }
    for (Eigen::Index c = 0; c < data.X_exog.cols(); ++c) {
      cell.str({});
      cell << data.X_exog(r, c);
      out << ',' << cell.str();
    }
    out << '\n';
  }
}

}  // namespace msvar
