#pragma once

#include "msvar/analysis.hpp"
#include "msvar/engine.hpp"
#include "msvar/indicators.hpp"
#include "msvar/serialization.hpp"
#include "msvar/timeseries.hpp"
#include "msvar/unit_root.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace msvar {

enum class OutputFormat { csv, json, both };

OutputFormat parse_output_format(const std::string& s);
const char* to_string(OutputFormat f) noexcept;

struct InputConfig {
  std::filesystem::path path;
  CsvSchema schema;
};

/// Household indicators derived from level consumption and income before the
/// transform plan runs.
struct IndicatorConfig {
  bool enabled = false;
  std::string consumption = "hc";
  std::string income = "hdi";
  std::string mpc_name = "mpc";
  std::string impc_name = "impc";
  double guard_epsilon = kDefaultGuardEpsilon;
};

struct PretestConfig {
  std::vector<std::string> variables;  // empty: model endogenous
  StationarityOptions options;
  int ips_replications = 2000;
  bool cointegration = true;
};

struct AnalysisConfig {
  int irf_horizon = 10;
  int fevd_horizon = 10;
  bool ergodic_irf = true;
  HouseholdVariables household;
  std::vector<std::string> fiscal = {"cgd", "exp", "rev", "sub"};
  std::string covid_variable = "covid";
};

struct SimulateConfig {
  int T = 200;
  int first_year = 1;
  std::string country = "SIM";
  std::optional<MsVarParameters> parameters;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  OutputFormat format = OutputFormat::both;
};

/// Fully validated pipeline configuration. Relative paths are resolved
/// against the directory of the config file.
struct PipelineConfig {
  std::optional<InputConfig> input;
  std::vector<std::string> countries;  // empty: every country in the input
  SeriesTransformPlan transforms;
  IndicatorConfig indicators;
  DummyWindow covid_window;
  std::optional<ModelSpec> model;
  EmOptions estimation;
  PretestConfig tests;
  AnalysisConfig analysis;
  std::optional<SimulateConfig> simulate;
  OutputConfig output;
  std::uint64_t seed = 0;

  Json source;  // parsed document, used for the config hash

  /// The model spec; throws ValidationError when the config has none.
  const ModelSpec& require_model() const;
};

/// Parses and validates. Unknown keys anywhere raise ValidationError naming
/// the full key path.
PipelineConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the canonical config (sorted keys, output block
/// excluded, effective seed included), as 16 hex digits.
std::string config_hash(const PipelineConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace msvar
