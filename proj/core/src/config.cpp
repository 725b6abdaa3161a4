#include "msvar/config.hpp"

#include "msvar/error.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace msvar {

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "both") return OutputFormat::both;
  throw ValidationError("output format must be csv, json or both, got '" + s + "'");
}

const char* to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
  }
  return "?";
}

const ModelSpec& PipelineConfig::require_model() const {
  if (!model) throw ValidationError("config: a 'model' block is required for this command");
  return *model;
}

namespace {

// Typed access to one JSON object, tracking its key path for messages.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config: '" + display() + "' must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) {
        throw ValidationError("config: unknown key '" + child_path(it.key()) + "'");
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  Node object(const char* key) const { return Node(j_.at(key), child_path(key)); }
  const Json& raw(const char* key) const { return j_.at(key); }
  const Json& json() const { return j_; }

  template <class T>
  T get(const char* key) const {
    if (!has(key)) throw ValidationError("config: missing required key '" + child_path(key) + "'");
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ValidationError("config: '" + child_path(key) + "' has the wrong type");
    }
  }

  template <class T>
  T get_or(const char* key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string display() const { return path_.empty() ? "(root)" : path_; }

 private:
  const Json& j_;
  std::string path_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("config: " + message);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

BlockMode parse_mode(const Node& n, const char* key, BlockMode fallback) {
  if (!n.has(key)) return fallback;
  const auto s = n.get<std::string>(key);
  if (s == "switching") return BlockMode::switching;
  if (s == "common") return BlockMode::common;
  throw ValidationError("config: '" + n.child_path(key) + "' must be 'switching' or 'common'");
}

InputConfig parse_input(const Node& n, const std::filesystem::path& base) {
  n.allow({"path", "layout", "columns", "default_country"});
  InputConfig in;
  in.path = resolve(base, n.get<std::string>("path"));
  const auto layout = n.get_or<std::string>("layout", "long");
  if (layout == "long") {
    in.schema.layout = CsvLayout::long_format;
  } else if (layout == "wide") {
    in.schema.layout = CsvLayout::wide_format;
  } else {
    throw ValidationError("config: 'input.layout' must be 'long' or 'wide'");
  }
  if (n.has("columns")) {
    const Node c = n.object("columns");
    c.allow({"country", "series", "year", "value"});
    in.schema.country_column = c.get_or<std::string>("country", in.schema.country_column);
    in.schema.series_column = c.get_or<std::string>("series", in.schema.series_column);
    in.schema.year_column = c.get_or<std::string>("year", in.schema.year_column);
    in.schema.value_column = c.get_or<std::string>("value", in.schema.value_column);
  }
  in.schema.default_country = n.get_or<std::string>("default_country", in.schema.default_country);
  return in;
}

SeriesTransformPlan parse_transforms(const Node& n) {
  SeriesTransformPlan plan;
  for (auto it = n.json().begin(); it != n.json().end(); ++it) {
    const std::string series = it.key();
    const std::string path = n.child_path(series);
    require(it.value().is_array(), "'" + path + "' must be an array of steps");
    auto& steps = plan.steps[series];
    for (std::size_t i = 0; i < it.value().size(); ++i) {
      const Node step(it.value()[i], path + "[" + std::to_string(i) + "]");
      const auto op = step.get<std::string>("op");
      if (op == "difference") {
        step.allow({"op", "order"});
        steps.emplace_back(DifferenceStep{step.get_or<int>("order", 1)});
      } else if (op == "deflate") {
        step.allow({"op", "by"});
        steps.emplace_back(DeflateStep{step.get<std::string>("by")});
      } else if (op == "gdp_share") {
        step.allow({"op", "gdp"});
        steps.emplace_back(GdpShareStep{step.get<std::string>("gdp")});
      } else if (op == "interpolate") {
        step.allow({"op"});
        steps.emplace_back(InterpolateStep{});
      } else if (op == "lag") {
        step.allow({"op", "k"});
        steps.emplace_back(LagStep{step.get_or<int>("k", 1)});
      } else {
        throw ValidationError("config: '" + step.child_path("op") + "' has unknown transform '" + op + "'");
      }
    }
  }
  plan.validate();
  return plan;
}

IndicatorConfig parse_indicators(const Node& n) {
  n.allow({"consumption", "income", "mpc", "impc", "guard_epsilon"});
  IndicatorConfig c;
  c.enabled = true;
  c.consumption = n.get_or<std::string>("consumption", c.consumption);
  c.income = n.get_or<std::string>("income", c.income);
  c.mpc_name = n.get_or<std::string>("mpc", c.mpc_name);
  c.impc_name = n.get_or<std::string>("impc", c.impc_name);
  c.guard_epsilon = n.get_or<double>("guard_epsilon", c.guard_epsilon);
  require(c.guard_epsilon >= 0.0, "'indicators.guard_epsilon' must be nonnegative");
  require(c.mpc_name != c.impc_name, "indicator series names must differ");
  return c;
}

DummyWindow parse_window(const Node& n) {
  n.allow({"name", "first_year", "last_year"});
  DummyWindow w;
  w.name = n.get_or<std::string>("name", w.name);
  w.first_year = n.get_or<int>("first_year", w.first_year);
  w.last_year = n.get_or<int>("last_year", w.last_year);
  require(!w.name.empty(), "'covid_window.name' must not be empty");
  require(w.first_year <= w.last_year, "'covid_window' first_year exceeds last_year");
  return w;
}

ModelSpec parse_model(const Node& n) {
  n.allow({"endogenous", "exogenous", "lag_order", "n_regimes", "include_intercept", "switching",
           "ordering"});
  ModelSpec s;
  s.endogenous = n.get<std::vector<std::string>>("endogenous");
  s.exogenous = n.get_or<std::vector<std::string>>("exogenous", {});
  s.lag_order = n.get_or<int>("lag_order", s.lag_order);
  s.n_regimes = n.get_or<int>("n_regimes", s.n_regimes);
  s.include_intercept = n.get_or<bool>("include_intercept", s.include_intercept);
  if (n.has("switching")) {
    const Node sw = n.object("switching");
    sw.allow({"intercept", "lag_matrices", "exog_coefficients", "covariance"});
    s.switching.intercept = parse_mode(sw, "intercept", s.switching.intercept);
    s.switching.lag_matrices = parse_mode(sw, "lag_matrices", s.switching.lag_matrices);
    s.switching.exog_coefficients = parse_mode(sw, "exog_coefficients", s.switching.exog_coefficients);
    s.switching.covariance = parse_mode(sw, "covariance", s.switching.covariance);
  }
  s.identification_ordering = n.get<std::vector<std::string>>("ordering");
  s.validate();
  resolve_ordering(s, s.identification_ordering);
  return s;
}

EmOptions parse_estimation(const Node& n) {
  n.allow({"init", "n_restarts", "max_iter", "tol", "standard_errors", "parallel"});
  EmOptions o;
  const auto init = n.get_or<std::string>("init", "automatic");
  if (init == "automatic") {
    o.init = InitStrategy::automatic;
  } else if (init == "perturbed_ols") {
    o.init = InitStrategy::perturbed_ols;
  } else if (init == "time_blocks") {
    o.init = InitStrategy::time_blocks;
  } else if (init == "residual_sorted") {
    o.init = InitStrategy::residual_sorted;
  } else if (init == "level_clusters") {
    o.init = InitStrategy::level_clusters;
  } else {
    throw ValidationError("config: 'estimation.init' has unknown strategy '" + init + "'");
  }
  o.n_restarts = n.get_or<int>("n_restarts", o.n_restarts);
  o.max_iter = n.get_or<int>("max_iter", o.max_iter);
  o.tol = n.get_or<double>("tol", o.tol);
  o.standard_errors = n.get_or<bool>("standard_errors", o.standard_errors);
  o.parallel = n.get_or<bool>("parallel", o.parallel);
  require(o.n_restarts >= 1, "'estimation.n_restarts' must be >= 1");
  require(o.max_iter >= 1, "'estimation.max_iter' must be >= 1");
  require(o.tol > 0.0, "'estimation.tol' must be positive");
  return o;
}

PretestConfig parse_tests(const Node& n) {
  n.allow({"variables", "deterministic", "lag_selection", "max_lags", "bandwidth", "p_floor",
           "ips_replications", "cointegration"});
  PretestConfig c;
  c.variables = n.get_or<std::vector<std::string>>("variables", {});
  const auto det = n.get_or<std::string>("deterministic", "constant");
  const auto parsed = parse_deterministic(det.c_str());
  require(parsed.has_value(), "'tests.deterministic' must be none, constant or constant+trend");
  c.options.deterministic = *parsed;
  const auto sel = n.get_or<std::string>("lag_selection", "bic");
  if (sel == "bic") {
    c.options.selection = LagSelection::bic;
  } else if (sel == "aic") {
    c.options.selection = LagSelection::aic;
  } else if (sel == "fixed") {
    c.options.selection = LagSelection::fixed;
  } else {
    throw ValidationError("config: 'tests.lag_selection' must be aic, bic or fixed");
  }
  if (n.has("max_lags")) c.options.max_lags = n.get<int>("max_lags");
  if (n.has("bandwidth")) c.options.bandwidth = n.get<int>("bandwidth");
  require(!c.options.max_lags || *c.options.max_lags >= 0, "'tests.max_lags' must be nonnegative");
  require(!c.options.bandwidth || *c.options.bandwidth >= 0, "'tests.bandwidth' must be nonnegative");
  require(c.options.selection != LagSelection::fixed || c.options.max_lags.has_value(),
          "'tests.max_lags' is required with fixed lag selection");
  c.options.p_floor = n.get_or<double>("p_floor", c.options.p_floor);
  require(c.options.p_floor > 0.0 && c.options.p_floor < 1.0, "'tests.p_floor' must lie in (0, 1)");
  c.ips_replications = n.get_or<int>("ips_replications", c.ips_replications);
  require(c.ips_replications >= 10, "'tests.ips_replications' must be >= 10");
  c.cointegration = n.get_or<bool>("cointegration", c.cointegration);
  return c;
}

AnalysisConfig parse_analysis(const Node& n) {
  n.allow({"irf_horizon", "fevd_horizon", "ergodic_irf", "household", "fiscal", "covid_variable"});
  AnalysisConfig a;
  a.irf_horizon = n.get_or<int>("irf_horizon", a.irf_horizon);
  a.fevd_horizon = n.get_or<int>("fevd_horizon", a.fevd_horizon);
  a.ergodic_irf = n.get_or<bool>("ergodic_irf", a.ergodic_irf);
  require(a.irf_horizon >= 0, "'analysis.irf_horizon' must be nonnegative");
  require(a.fevd_horizon >= 1, "'analysis.fevd_horizon' must be >= 1");
  if (n.has("household")) {
    const Node h = n.object("household");
    h.allow({"consumption", "income", "impc", "mpc"});
    a.household.consumption = h.get_or<std::string>("consumption", a.household.consumption);
    a.household.income = h.get_or<std::string>("income", a.household.income);
    a.household.impc = h.get_or<std::string>("impc", a.household.impc);
    a.household.mpc = h.get_or<std::string>("mpc", a.household.mpc);
  }
  a.fiscal = n.get_or<std::vector<std::string>>("fiscal", a.fiscal);
  a.covid_variable = n.get_or<std::string>("covid_variable", a.covid_variable);
  return a;
}

SimulateConfig parse_simulate(const Node& n) {
  n.allow({"T", "first_year", "country", "parameters"});
  SimulateConfig s;
  s.T = n.get_or<int>("T", s.T);
  s.first_year = n.get_or<int>("first_year", s.first_year);
  s.country = n.get_or<std::string>("country", s.country);
  require(!s.country.empty(), "'simulate.country' must not be empty");
  if (n.has("parameters")) {
    try {
      s.parameters = parameters_from_json(n.raw("parameters"));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("config: 'simulate.parameters': ") + e.what());
    }
    require(s.T > s.parameters->spec.lag_order, "'simulate.T' must exceed the lag order");
  }
  return s;
}

OutputConfig parse_output(const Node& n, const std::filesystem::path& base) {
  n.allow({"dir", "format"});
  OutputConfig o;
  o.dir = resolve(base, n.get_or<std::string>("dir", "out"));
  o.format = parse_output_format(n.get_or<std::string>("format", "both"));
  return o;
}

}  // namespace

PipelineConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
  const Node root(j, "");
  root.allow({"input", "countries", "transforms", "indicators", "covid_window", "model",
              "estimation", "tests", "analysis", "simulate", "output", "seed"});
  PipelineConfig c;
  c.source = j;
  if (root.has("input")) c.input = parse_input(root.object("input"), base_dir);
  c.countries = root.get_or<std::vector<std::string>>("countries", {});
  if (root.has("transforms")) c.transforms = parse_transforms(root.object("transforms"));
  if (root.has("indicators")) c.indicators = parse_indicators(root.object("indicators"));
  if (root.has("covid_window")) c.covid_window = parse_window(root.object("covid_window"));
  if (root.has("model")) c.model = parse_model(root.object("model"));
  if (root.has("estimation")) c.estimation = parse_estimation(root.object("estimation"));
  if (root.has("tests")) c.tests = parse_tests(root.object("tests"));
  if (root.has("analysis")) c.analysis = parse_analysis(root.object("analysis"));
  if (root.has("simulate")) c.simulate = parse_simulate(root.object("simulate"));
  c.output = root.has("output") ? parse_output(root.object("output"), base_dir)
                                : parse_output(Node(Json::object(), "output"), base_dir);
  c.seed = root.get_or<std::uint64_t>("seed", 0);
  c.estimation.seed = c.seed;

  if (c.model) {
    for (const auto& x : c.model->exogenous) {
      const bool is_dummy = c.covid_window.name == x;
      require(is_dummy || c.input.has_value(),
              "exogenous variable '" + x + "' is neither the covid_window dummy nor an input series");
    }
  }
  if (c.simulate && c.simulate->parameters) {
    for (const auto& x : c.simulate->parameters->spec.exogenous) {
      require(c.covid_window.name == x,
              "simulated exogenous variable '" + x + "' must be the covid_window dummy");
    }
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const PipelineConfig& config) {
  Json canonical = config.source;
  canonical.erase("output");
  canonical["seed"] = config.seed;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical.dump())));
  return buf;
}

}  // namespace msvar
