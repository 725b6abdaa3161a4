#include "msvar/report.hpp"

#include "msvar/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msvar {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(cells[i]);
  }
  out += '\n';
  return out;
}

// p-values as printed in unit-root summaries: four decimals, or three
// significant digits in scientific notation below 1e-4.
std::string display_p(double p) {
  if (p > 0.0 && p < 1e-4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", p);
    return buf;
  }
  return display_number(p, 4);
}

std::string unit_root_verdict(double p) { return p < 0.05 ? "reject unit root" : "fail to reject"; }

Json with_header(const OutputHeader& h, const char* kind, Json body) {
  Json j = {{"header", header_json(h)}, {"kind", kind}};
  j["body"] = std::move(body);
  return j;
}

std::string regime_label(int regime) {
  return regime == kErgodicRegime ? "ergodic" : std::to_string(regime + 1);
}

}  // namespace

const char* library_version() noexcept { return MSVAR_VERSION; }

std::string csv_header_block(const OutputHeader& h) {
  std::string out;
  out += "# config_hash: " + h.config_hash + "\n";
  out += "# seed: " + std::to_string(h.seed) + "\n";
  out += "# version: " + h.version + "\n";
  out += "# cholesky_ordering: " + join(h.ordering, ",") + "\n";
  return out;
}

Json header_json(const OutputHeader& h) {
  return Json{{"config_hash", h.config_hash},
              {"seed", h.seed},
              {"version", h.version},
              {"cholesky_ordering", h.ordering}};
}

std::string shortest(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string stationarity_csv(const StationarityTable& t, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  out += csv_row({"Country", "Block", "Test Method", "Test Statistic", "p-Value", "Cross-Sections",
                  "Observations", "Verdict (5%)"});
  auto block = [&](const char* name, const std::vector<StationarityRow>& rows) {
    for (const auto& r : rows) {
      out += csv_row({t.country_id, name, r.method,
                      r.statistic ? display_number(*r.statistic, 4) : "not computed",
                      r.p_value ? display_p(*r.p_value) : "not computed",
                      std::to_string(r.cross_sections), std::to_string(r.observations),
                      r.p_value ? unit_root_verdict(*r.p_value) : ""});
    }
  };
  block("level", t.level);
  block("first difference", t.first_difference);
  return out;
}

Json stationarity_json(const StationarityTable& t, const OutputHeader& h) {
  auto rows = [](const std::vector<StationarityRow>& rs) {
    Json a = Json::array();
    for (const auto& r : rs) {
      a.push_back({{"method", r.method},
                   {"statistic", r.statistic ? Json(*r.statistic) : Json(nullptr)},
                   {"p_value", r.p_value ? Json(*r.p_value) : Json(nullptr)},
                   {"cross_sections", r.cross_sections},
                   {"observations", r.observations},
                   {"verdict", r.p_value ? Json(unit_root_verdict(*r.p_value)) : Json(nullptr)}});
    }
    return a;
  };
  return with_header(h, "stationarity",
                     {{"country", t.country_id},
                      {"variables", t.variables},
                      {"level", rows(t.level)},
                      {"first_difference", rows(t.first_difference)}});
}

std::string cointegration_csv(const std::vector<CointegrationReport>& rows, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  out += csv_row({"Variable", "Result", "Verdict", "Lags", "Observations"});
  for (const auto& r : rows) {
    out += csv_row({r.dependent, format_tau_cell(r), classify_cointegration(r.p_value.value),
                    std::to_string(r.lags_used), std::to_string(r.observations)});
  }
  return out;
}

Json cointegration_json(const std::vector<CointegrationReport>& rows, const OutputHeader& h) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"dependent", r.dependent},
                 {"regressors", r.regressors},
                 {"deterministic", to_string(r.deterministic)},
                 {"tau", r.tau},
                 {"p_value", r.p_value.value},
                 {"p_value_bracketed", r.p_value.bracketed},
                 {"verdict", classify_cointegration(r.p_value.value)},
                 {"lags_used", r.lags_used},
                 {"observations", r.observations},
                 {"notes", r.notes}});
  }
  return with_header(h, "cointegration", a);
}

namespace {

std::vector<int> positions(const std::vector<std::string>& variables,
                           const std::vector<std::string>& ordering) {
  std::vector<int> idx;
  for (const auto& name : ordering) {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i] == name) idx.push_back(static_cast<int>(i));
    }
  }
  return idx;
}

}  // namespace

std::string fevd_csv(const FevdTable& t, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  const auto order = positions(t.variables, t.identification);
  out += "# regime: " + regime_label(t.regime) + "\n";
  for (std::size_t i = 0; i < t.variables.size(); ++i) {
    out += "# response: " + t.variables[i] + "\n";
    std::vector<std::string> head = {"Period", "S.E."};
    for (int j : order) head.push_back(t.variables[static_cast<std::size_t>(j)]);
    out += csv_row(head);
    for (std::size_t k = 0; k < t.shares.size(); ++k) {
      std::vector<std::string> row = {std::to_string(k + 1),
                                      display_number(t.standard_error(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)), 6)};
      for (int j : order) row.push_back(display_number(100.0 * t.shares[k](static_cast<Eigen::Index>(i), j), 2));
      out += csv_row(row);
    }
  }
  return out;
}

Json fevd_json(const FevdTable& t, const OutputHeader& h) {
  Json shares = Json::array();
  for (const auto& s : t.shares) shares.push_back(matrix_to_json(s));
  return with_header(h, "fevd",
                     {{"regime", regime_label(t.regime)},
                      {"variables", t.variables},
                      {"identification", t.identification},
                      {"shares", shares},
                      {"standard_error", matrix_to_json(t.standard_error)}});
}

std::string irf_csv(const std::vector<IrfSurface>& surfaces, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  out += csv_row({"horizon", "response", "shock", "regime", "value"});
  for (const auto& s : surfaces) {
    for (Eigen::Index hz = 0; hz < s.responses.rows(); ++hz) {
      for (std::size_t i = 0; i < s.variables.size(); ++i) {
        out += csv_row({std::to_string(hz), s.variables[i], s.shock_variable, regime_label(s.regime),
                        shortest(s.responses(hz, static_cast<Eigen::Index>(i)))});
      }
    }
  }
  return out;
}

Json irf_json(const std::vector<IrfSurface>& surfaces, const OutputHeader& h) {
  Json a = Json::array();
  for (const auto& s : surfaces) {
    a.push_back({{"regime", regime_label(s.regime)},
                 {"shock", s.shock_variable},
                 {"variables", s.variables},
                 {"identification", s.identification},
                 {"shock_size", s.shock_size},
                 {"non_decaying", s.non_decaying},
                 {"responses", matrix_to_json(s.responses)}});
  }
  return with_header(h, "irf", a);
}

std::string chronology_csv(const RegimeChronology& c, const Matrix& smoothed, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  std::vector<std::string> head = {"year", "modal_regime"};
  for (Eigen::Index k = 0; k < smoothed.cols(); ++k) head.push_back("p_regime_" + std::to_string(k + 1));
  out += csv_row(head);
  for (std::size_t t = 0; t < c.years.size(); ++t) {
    std::vector<std::string> row = {std::to_string(c.years[t]), std::to_string(c.modal_regime[t] + 1)};
    for (Eigen::Index k = 0; k < smoothed.cols(); ++k) {
      row.push_back(display_number(smoothed(static_cast<Eigen::Index>(t), k), 4));
    }
    out += csv_row(row);
  }
  return out;
}

std::string episodes_csv(const RegimeChronology& c, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  out += csv_row({"regime", "start_year", "end_year", "mean_probability"});
  for (const auto& e : c.episodes) {
    out += csv_row({std::to_string(e.regime + 1), std::to_string(e.start_year), std::to_string(e.end_year),
                    display_number(e.mean_probability, 4)});
  }
  return out;
}

Json chronology_json(const RegimeChronology& c, const Matrix& smoothed, const OutputHeader& h) {
  Json eps = Json::array();
  for (const auto& e : c.episodes) {
    eps.push_back({{"regime", e.regime + 1},
                   {"start_year", e.start_year},
                   {"end_year", e.end_year},
                   {"mean_probability", e.mean_probability}});
  }
  std::vector<int> modal;
  for (int m : c.modal_regime) modal.push_back(m + 1);
  return with_header(h, "regime_chronology",
                     {{"years", c.years},
                      {"modal_regime", modal},
                      {"smoothed_probs", matrix_to_json(smoothed)},
                      {"episodes", eps}});
}

std::string comparison_csv(const ComparisonTable& t, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  std::vector<std::string> head = {t.corner};
  head.insert(head.end(), t.columns.begin(), t.columns.end());
  out += csv_row(head);
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    std::vector<std::string> row = {t.row_labels[r]};
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
      row.push_back(display_number(t.values(static_cast<Eigen::Index>(r), c), 4));
    }
    out += csv_row(row);
  }
  return out;
}

Json comparison_json(const ComparisonTable& t, const OutputHeader& h) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    Json vals = Json::array();
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
      const double v = t.values(static_cast<Eigen::Index>(r), c);
      vals.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    }
    rows.push_back({{"label", t.row_labels[r]}, {"values", vals}});
  }
  return with_header(h, "comparison", {{"columns", t.columns}, {"rows", rows}});
}

std::string coefficients_csv(const EstimatedMsVar& fit, const OutputHeader& h) {
  const auto& spec = fit.spec();
  std::string out = csv_header_block(h);
  out += "# log_likelihood: " + shortest(fit.log_likelihood) + "\n";
  out += csv_row({"regime", "equation", "regressor", "coefficient", "std_error"});
  for (std::size_t k = 0; k < fit.params.regimes.size(); ++k) {
    const auto& r = fit.params.regimes[k];
    const CoefficientErrors* se = fit.standard_errors ? &(*fit.standard_errors)[k] : nullptr;
    auto cell = [](const double* v) { return v ? display_number(*v, 6) : std::string(); };
    for (std::size_t i = 0; i < spec.n(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const std::string reg = std::to_string(k + 1);
      if (spec.include_intercept) {
        const double* s = se ? &se->intercept(ii) : nullptr;
        out += csv_row({reg, spec.endogenous[i], "C", display_number(r.intercept(ii), 6), cell(s)});
      }
      for (std::size_t l = 0; l < r.lags.size(); ++l) {
        for (std::size_t j = 0; j < spec.n(); ++j) {
          const auto jj = static_cast<Eigen::Index>(j);
          const double* s = se ? &se->lags[l](ii, jj) : nullptr;
          out += csv_row({reg, spec.endogenous[i], spec.endogenous[j] + "(-" + std::to_string(l + 1) + ")",
                          display_number(r.lags[l](ii, jj), 6), cell(s)});
        }
      }
      for (std::size_t j = 0; j < spec.m(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double* s = se ? &se->exog(ii, jj) : nullptr;
        out += csv_row({reg, spec.endogenous[i], spec.exogenous[j], display_number(r.exog(ii, jj), 6), cell(s)});
      }
    }
  }
  out += "# transition matrix (row: from regime, column: to regime)\n";
  for (Eigen::Index i = 0; i < fit.params.transition.P.rows(); ++i) {
    std::vector<std::string> row = {"P", std::to_string(i + 1)};
    for (Eigen::Index j = 0; j < fit.params.transition.P.cols(); ++j) {
      row.push_back(display_number(fit.params.transition.P(i, j), 6));
    }
    out += csv_row(row);
  }
  return out;
}

std::string dataset_csv(const ModelDataset& d, const OutputHeader& h) {
  std::ostringstream body;
  write_dataset_csv(body, d);
  return csv_header_block(h) + body.str();
}

std::string indicators_csv(const std::vector<IndicatorSeries>& series,
                           const std::vector<std::string>& names, const OutputHeader& h) {
  std::string out = csv_header_block(h);
  out += csv_row({"indicator", "year", "value", "flag"});
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (const auto& p : series[s].points) {
      out += csv_row({names[s], std::to_string(p.year), p.value ? shortest(*p.value) : "", p.flag});
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace msvar
