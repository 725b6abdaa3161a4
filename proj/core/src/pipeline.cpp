#include "msvar/pipeline.hpp"

#include "msvar/error.hpp"
#include "msvar/rng.hpp"

#include <algorithm>
#include <fstream>
#include <future>

namespace msvar {

namespace {

// Emits the CSV and/or JSON twin of one report.
class Emitter {
 public:
  Emitter(const PipelineConfig& config, CommandResult& result)
      : root_(config.output.dir), format_(config.output.format), result_(result) {}

  bool csv() const { return format_ != OutputFormat::json; }
  bool json() const { return format_ != OutputFormat::csv; }

  void text(const std::filesystem::path& rel, const std::string& content) {
    write_file(root_ / rel, content);
    result_.written.push_back(root_ / rel);
  }
  void document(const std::filesystem::path& rel, const Json& j) { text(rel, j.dump(2) + "\n"); }

  void both(const std::string& stem, const std::string& csv_content, const Json& j) {
    if (csv()) text(stem + ".csv", csv_content);
    if (json()) document(stem + ".json", j);
  }

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  OutputFormat format_;
  CommandResult& result_;
};

void finish(CommandResult& r) { std::sort(r.written.begin(), r.written.end()); }

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

Json dataset_json(const ModelDataset& d, const OutputHeader& h) {
  return Json{{"header", header_json(h)},
              {"kind", "dataset"},
              {"body",
               {{"years", d.year_index},
                {"variables", d.variable_names},
                {"exogenous", d.exog_names},
                {"lag_order", d.lag_order},
                {"Y", matrix_to_json(d.Y)},
                {"X_exog", matrix_to_json(d.X_exog)}}}};
}

std::vector<std::string> pretest_variables(const PipelineConfig& c) {
  if (!c.tests.variables.empty()) return c.tests.variables;
  return c.require_model().endogenous;
}

}  // namespace

OutputHeader make_header(const PipelineConfig& config) {
  OutputHeader h;
  h.config_hash = config_hash(config);
  h.seed = config.seed;
  if (config.model) {
    h.ordering = resolve_ordering(*config.model, config.model->identification_ordering);
  } else if (config.simulate && config.simulate->parameters) {
    const auto& spec = config.simulate->parameters->spec;
    h.ordering = resolve_ordering(spec, spec.identification_ordering);
  }
  return h;
}

std::uint64_t country_seed(std::uint64_t master, const std::string& country) {
  return split_seed(master, fnv1a64(country));
}

SeriesTransformPlan level_plan(const SeriesTransformPlan& plan) {
  SeriesTransformPlan out;
  for (const auto& [name, steps] : plan.steps) {
    auto& dst = out.steps[name];
    for (const auto& step : steps) {
      if (!std::holds_alternative<DifferenceStep>(step)) dst.push_back(step);
    }
  }
  return out;
}

std::vector<TimeSeriesPanel> load_input(const PipelineConfig& config) {
  if (!config.input) throw ValidationError("config: an 'input' block is required for this command");
  std::ifstream in(config.input->path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + config.input->path.string() + "'");
  auto panels = load_panel(in, config.input->schema);
  if (!config.countries.empty()) {
    std::vector<TimeSeriesPanel> kept;
    for (const auto& id : config.countries) {
      const auto it = std::find_if(panels.begin(), panels.end(),
                                   [&](const TimeSeriesPanel& p) { return p.country_id == id; });
      if (it == panels.end()) throw ValidationError("country '" + id + "' not found in input");
      kept.push_back(*it);
    }
    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return a.country_id < b.country_id; });
    panels = std::move(kept);
  }
  if (config.indicators.enabled) {
    const auto& ic = config.indicators;
    for (auto& p : panels) {
      for (const auto& name : {ic.mpc_name, ic.impc_name}) {
        if (p.series.count(name)) {
          throw ValidationError("panel '" + p.country_id + "' already has a series named '" + name +
                                "'; indicator output would overwrite it");
        }
      }
      const Series& c = p.get(ic.consumption);
      const Series& y = p.get(ic.income);
      p.series[ic.mpc_name] = mpc_series(c, y, ic.guard_epsilon).to_series();
      p.series[ic.impc_name] = impc_series(c, y, ic.guard_epsilon).to_series();
    }
  }
  return panels;
}

CommandResult cmd_ingest(const PipelineConfig& config) {
  const ModelSpec& spec = config.require_model();
  const auto panels = load_input(config);
  const OutputHeader h = make_header(config);
  CommandResult result;
  Emitter out(config, result);
  for (const auto& p : panels) {
    const auto stem = "datasets/" + safe_name(p.country_id);
    const ModelDataset d = build_dataset(p, config.transforms, spec, config.covid_window);
    out.both(stem, dataset_csv(d, h), dataset_json(d, h));
    if (config.indicators.enabled && out.csv()) {
      const auto& ic = config.indicators;
      const Series& c = p.get(ic.consumption);
      const Series& y = p.get(ic.income);
      out.text(stem + "_indicators.csv",
               indicators_csv({mpc_series(c, y, ic.guard_epsilon), impc_series(c, y, ic.guard_epsilon)},
                              {ic.mpc_name, ic.impc_name}, h));
    }
  }
  finish(result);
  return result;
}

CommandResult cmd_pretest(const PipelineConfig& config) {
  const auto variables = pretest_variables(config);
  const auto panels = load_input(config);
  const OutputHeader h = make_header(config);
  const SeriesTransformPlan plan = level_plan(config.transforms);
  const IpsMomentCache cache(split_seed(config.seed, 0x1b5), config.tests.ips_replications);
  CommandResult result;
  Emitter out(config, result);
  for (const auto& p : panels) {
    const auto stem = "pretest/" + safe_name(p.country_id);
    const auto table = stationarity_pipeline(p, plan, variables, cache, config.tests.options);
    out.both(stem + "_stationarity", stationarity_csv(table, h), stationarity_json(table, h));
    if (config.tests.cointegration && variables.size() >= 2) {
      ModelSpec levels;
      levels.endogenous = variables;
      levels.n_regimes = 1;
      levels.lag_order = 1;
      const ModelDataset d = build_dataset(p, plan, levels, DummyWindow{"", 0, 0});
      std::vector<std::vector<double>> cols;
      for (Eigen::Index j = 0; j < d.Y.cols(); ++j) {
        cols.emplace_back(d.Y.col(j).data(), d.Y.col(j).data() + d.Y.rows());
      }
      const auto rows = engle_granger_each_vs_rest(variables, cols, config.tests.options.deterministic);
      out.both(stem + "_cointegration", cointegration_csv(rows, h), cointegration_json(rows, h));
    }
  }
  finish(result);
  return result;
}

CommandResult cmd_fit(const PipelineConfig& config) {
  const ModelSpec& spec = config.require_model();
  const auto panels = load_input(config);
  const OutputHeader h = make_header(config);

  // Build every dataset first so validation errors surface before estimation.
  std::vector<ModelDataset> datasets;
  for (const auto& p : panels) datasets.push_back(build_dataset(p, config.transforms, spec, config.covid_window));

  std::vector<std::future<EstimatedMsVar>> jobs;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      EmOptions opt = config.estimation;
      opt.seed = country_seed(config.seed, panels[i].country_id);
      EstimatedMsVar fit = spec.n_regimes == 1 ? ols_var_fit(spec, datasets[i]) : em_fit(spec, datasets[i], opt);
      if (spec.n_regimes == 1 && opt.standard_errors) {
        fit.standard_errors = approximate_standard_errors(fit.params, datasets[i]);
      }
      fit.label = panels[i].country_id;
      return fit;
    }));
  }
  std::vector<EstimatedMsVar> fits;
  for (auto& j : jobs) fits.push_back(j.get());

  CommandResult result;
  Emitter out(config, result);
  for (const auto& fit : fits) {
    const auto stem = "models/" + safe_name(fit.label);
    Json doc = model_to_json(fit);
    doc["header"] = header_json(h);
    out.document(stem + ".json", doc);
    if (out.csv()) out.text(stem + "_coefficients.csv", coefficients_csv(fit, h));
    for (const auto& w : fit.warnings) result.warnings.push_back(fit.label + ": " + w);
  }
  finish(result);
  return result;
}

CommandResult cmd_analyze(const PipelineConfig& config) {
  const auto models_dir = config.output.dir / "models";
  std::vector<std::filesystem::path> files;
  if (!config.countries.empty()) {
    for (const auto& c : config.countries) files.push_back(models_dir / (safe_name(c) + ".json"));
  } else {
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(models_dir, ec)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    if (ec) throw IoError("cannot list models directory '" + models_dir.string() + "': " + ec.message());
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw IoError("no fitted models found in '" + models_dir.string() + "'");

  std::vector<EstimatedMsVar> models;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + f.string() + "'");
    models.push_back(read_model(in));
  }

  const auto& ac = config.analysis;
  OutputHeader base = make_header(config);
  CommandResult result;
  Emitter out(config, result);
  for (const auto& m : models) {
    const auto& spec = m.spec();
    OutputHeader h = base;
    h.ordering = resolve_ordering(spec, spec.identification_ordering);
    const auto dir = "analysis/" + safe_name(m.label) + "/";
    const int K = spec.n_regimes;

    std::vector<int> regimes;
    for (int k = 0; k < K; ++k) regimes.push_back(k);
    if (K > 1 && ac.ergodic_irf) regimes.push_back(kErgodicRegime);
    std::vector<IrfSurface> all;
    for (int k : regimes) {
      for (const auto& shock : spec.endogenous) {
        IrfSurface s = irf(m.params, k, shock, ac.irf_horizon, h.ordering);
        if (s.non_decaying) {
          result.warnings.push_back(m.label + ": IRF for regime " +
                                    (k == kErgodicRegime ? std::string("ergodic") : std::to_string(k + 1)) +
                                    " does not decay (companion spectral radius >= 1)");
        }
        if (out.csv()) {
          const std::string reg = k == kErgodicRegime ? "ergodic" : "regime_" + std::to_string(k + 1);
          out.text(dir + "irf/" + reg + "_" + safe_name(shock) + ".csv", irf_csv({s}, h));
        }
        all.push_back(std::move(s));
      }
    }
    if (out.json()) out.document(dir + "irf.json", irf_json(all, h));

    for (int k = 0; k < K; ++k) {
      const FevdTable t = fevd(m.params, k, ac.fevd_horizon, h.ordering);
      out.both(dir + "fevd_regime_" + std::to_string(k + 1), fevd_csv(t, h), fevd_json(t, h));
    }
    const RegimeChronology chron = regime_dates(m);
    if (out.csv()) {
      out.text(dir + "chronology.csv", chronology_csv(chron, m.smoothed_probs, h));
      out.text(dir + "episodes.csv", episodes_csv(chron, h));
    }
    if (out.json()) out.document(dir + "chronology.json", chronology_json(chron, m.smoothed_probs, h));
  }

  const ComparisonTable covid = covid_shock_table(models, ac.covid_variable, ac.household);
  out.both("analysis/covid_shock", comparison_csv(covid, base), comparison_json(covid, base));
  const ComparisonTable fiscal = fiscal_impact_table(models, ac.fiscal, ac.household);
  out.both("analysis/fiscal_impact", comparison_csv(fiscal, base), comparison_json(fiscal, base));
  finish(result);
  return result;
}

CommandResult cmd_simulate(const PipelineConfig& config) {
  if (!config.simulate || !config.simulate->parameters) {
    throw ValidationError("config: 'simulate.parameters' is required for simulate");
  }
  const auto& sc = *config.simulate;
  const MsVarParameters& params = *sc.parameters;
  const auto& spec = params.spec;
  const OutputHeader h = make_header(config);

  Matrix exog(sc.T, static_cast<Eigen::Index>(spec.m()));
  for (int t = 0; t < sc.T; ++t) {
    const int year = sc.first_year + t;
    const double on = (year >= config.covid_window.first_year && year <= config.covid_window.last_year) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < exog.cols(); ++j) exog(t, j) = on;
  }
  const SimulationResult sim = simulate(params, sc.T, exog, country_seed(config.seed, sc.country), sc.first_year);

  CommandResult result;
  Emitter out(config, result);
  const auto stem = "simulate/" + safe_name(sc.country);
  std::string panel = csv_header_block(h) + "country,series,year,value\n";
  for (std::size_t j = 0; j < spec.n(); ++j) {
    for (int t = 0; t < sc.T; ++t) {
      panel += csv_escape(sc.country) + "," + csv_escape(spec.endogenous[j]) + "," +
               std::to_string(sim.data.year_index[static_cast<std::size_t>(t)]) + "," +
               shortest(sim.data.Y(t, static_cast<Eigen::Index>(j))) + "\n";
    }
  }
  out.text(stem + "_panel.csv", panel);
  std::string path = csv_header_block(h) + "year,regime\n";
  const auto years = sim.data.effective_years();
  for (std::size_t t = 0; t < sim.regime_path.size(); ++t) {
    path += std::to_string(years[t]) + "," + std::to_string(sim.regime_path[t] + 1) + "\n";
  }
  out.text(stem + "_regimes.csv", path);
  out.document(stem + "_true_parameters.json",
               Json{{"header", header_json(h)}, {"kind", "true_parameters"}, {"body", parameters_to_json(params)}});
  finish(result);
  return result;
}

}  // namespace msvar
