#pragma once

#include "msvar/analysis.hpp"
#include "msvar/cointegration.hpp"
#include "msvar/indicators.hpp"
#include "msvar/serialization.hpp"
#include "msvar/unit_root.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace msvar {

const char* library_version() noexcept;

/// Provenance block stamped on every emitted file.
struct OutputHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = library_version();
  std::vector<std::string> ordering;
};

/// "# key: value" lines.
std::string csv_header_block(const OutputHeader& h);
Json header_json(const OutputHeader& h);

/// Shortest decimal string that reads back to the same double.
std::string shortest(double v);
std::string csv_escape(const std::string& cell);

// Display tables (CSV) round to printed precision; the JSON twins keep full
// precision.
std::string stationarity_csv(const StationarityTable& t, const OutputHeader& h);
Json stationarity_json(const StationarityTable& t, const OutputHeader& h);

std::string cointegration_csv(const std::vector<CointegrationReport>& rows, const OutputHeader& h);
Json cointegration_json(const std::vector<CointegrationReport>& rows, const OutputHeader& h);

/// Period, S.E., then percentage shares with shock columns in Cholesky order.
std::string fevd_csv(const FevdTable& t, const OutputHeader& h);
Json fevd_json(const FevdTable& t, const OutputHeader& h);

/// Long plot data: horizon, response, shock, regime, value.
std::string irf_csv(const std::vector<IrfSurface>& surfaces, const OutputHeader& h);
Json irf_json(const std::vector<IrfSurface>& surfaces, const OutputHeader& h);

std::string chronology_csv(const RegimeChronology& c, const Matrix& smoothed, const OutputHeader& h);
std::string episodes_csv(const RegimeChronology& c, const OutputHeader& h);
Json chronology_json(const RegimeChronology& c, const Matrix& smoothed, const OutputHeader& h);

std::string comparison_csv(const ComparisonTable& t, const OutputHeader& h);
Json comparison_json(const ComparisonTable& t, const OutputHeader& h);

/// Regime-specific coefficient table: regime, equation, regressor,
/// coefficient and (when available) approximate standard error.
std::string coefficients_csv(const EstimatedMsVar& fit, const OutputHeader& h);

std::string dataset_csv(const ModelDataset& d, const OutputHeader& h);
std::string indicators_csv(const std::vector<IndicatorSeries>& series,
                           const std::vector<std::string>& names, const OutputHeader& h);

/// Writes `content` to `path`, creating parent directories; IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace msvar
