#pragma once

#include "msvar/config.hpp"
#include "msvar/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace msvar {

struct CommandResult {
  std::vector<std::filesystem::path> written;  // sorted
  std::vector<std::string> warnings;
};

OutputHeader make_header(const PipelineConfig& config);

/// Reads the configured CSV, keeps the configured countries and appends the
/// household indicator series.
std::vector<TimeSeriesPanel> load_input(const PipelineConfig& config);

/// Transform plan for pre-testing: the configured plan without differencing,
/// since the tests examine levels and first differences themselves.
SeriesTransformPlan level_plan(const SeriesTransformPlan& plan);

/// Per-country master seed, independent of which other countries are present.
std::uint64_t country_seed(std::uint64_t master, const std::string& country);

// Output tree under config.output.dir:
//   datasets/      ingest: aligned model datasets and indicator series
//   pretest/       unit-root and cointegration summaries
//   models/        fitted models (<country>.json) and coefficient tables
//   analysis/      IRF plot data, FEVD tables, regime chronology, comparisons
//   simulate/      synthetic long-format panel and the true parameters
CommandResult cmd_ingest(const PipelineConfig& config);
CommandResult cmd_pretest(const PipelineConfig& config);
CommandResult cmd_fit(const PipelineConfig& config);
/// Reads only the fitted models under models/.
CommandResult cmd_analyze(const PipelineConfig& config);
CommandResult cmd_simulate(const PipelineConfig& config);

}  // namespace msvar
