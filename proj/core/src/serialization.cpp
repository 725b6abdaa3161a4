#include "msvar/serialization.hpp"

#include "msvar/error.hpp"

#include <istream>

namespace msvar {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("model document: missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("model document: field '") + key + "' has the wrong type");
  }
}

const char* mode_name(BlockMode m) { return m == BlockMode::switching ? "switching" : "common"; }

BlockMode mode_from(const Json& j, const char* key) {
  const auto s = get_as<std::string>(j, key);
  if (s == "switching") return BlockMode::switching;
  if (s == "common") return BlockMode::common;
  throw ValidationError(std::string("switching.") + key + " must be 'switching' or 'common', got '" +
                        s + "'");
}

}  // namespace

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(std::string(what) + ": ragged matrix at row " + std::to_string(i));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ValidationError(std::string(what) + ": non-numeric entry");
      M(i, c) = v.get<double>();
    }
  }
  return M;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(std::string(what) + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json spec_to_json(const ModelSpec& spec) {
  return Json{{"endogenous", spec.endogenous},
              {"exogenous", spec.exogenous},
              {"lag_order", spec.lag_order},
              {"n_regimes", spec.n_regimes},
              {"include_intercept", spec.include_intercept},
              {"identification_ordering", spec.identification_ordering},
              {"switching",
               {{"intercept", mode_name(spec.switching.intercept)},
                {"lag_matrices", mode_name(spec.switching.lag_matrices)},
                {"exog_coefficients", mode_name(spec.switching.exog_coefficients)},
                {"covariance", mode_name(spec.switching.covariance)}}}};
}

ModelSpec spec_from_json(const Json& j) {
  ModelSpec s;
  s.endogenous = get_as<std::vector<std::string>>(j, "endogenous");
  s.exogenous = get_as<std::vector<std::string>>(j, "exogenous");
  s.lag_order = get_as<int>(j, "lag_order");
  s.n_regimes = get_as<int>(j, "n_regimes");
  s.include_intercept = get_as<bool>(j, "include_intercept");
  s.identification_ordering = get_as<std::vector<std::string>>(j, "identification_ordering");
  const auto& sw = field(j, "switching");
  s.switching.intercept = mode_from(sw, "intercept");
  s.switching.lag_matrices = mode_from(sw, "lag_matrices");
  s.switching.exog_coefficients = mode_from(sw, "exog_coefficients");
  s.switching.covariance = mode_from(sw, "covariance");
  s.validate();
  return s;
}

Json parameters_to_json(const MsVarParameters& params) {
  Json regimes = Json::array();
  for (const auto& r : params.regimes) {
    Json lags = Json::array();
    for (const auto& A : r.lags) lags.push_back(matrix_to_json(A));
    regimes.push_back({{"intercept", vector_to_json(r.intercept)},
                       {"lags", lags},
                       {"exog", matrix_to_json(r.exog)},
                       {"covariance", matrix_to_json(r.covariance)}});
  }
  return Json{{"spec", spec_to_json(params.spec)},
              {"regimes", regimes},
              {"transition", matrix_to_json(params.transition.P)},
              {"initial_probs", vector_to_json(params.initial_probs)}};
}

MsVarParameters parameters_from_json(const Json& j) {
  MsVarParameters p;
  p.spec = spec_from_json(field(j, "spec"));
  const auto& regimes = field(j, "regimes");
  if (!regimes.is_array()) throw ValidationError("parameters: 'regimes' must be an array");
  for (const auto& rj : regimes) {
    RegimeParameterSet r;
    r.intercept = vector_from_json(field(rj, "intercept"), "intercept");
    const auto& lags = field(rj, "lags");
    if (!lags.is_array()) throw ValidationError("parameters: 'lags' must be an array");
    for (const auto& A : lags) r.lags.push_back(matrix_from_json(A, "lags"));
    r.exog = matrix_from_json(field(rj, "exog"), "exog");
    if (r.exog.rows() == 0) r.exog.resize(static_cast<Eigen::Index>(p.spec.n()), 0);
    r.covariance = matrix_from_json(field(rj, "covariance"), "covariance");
    p.regimes.push_back(std::move(r));
  }
  p.transition.P = matrix_from_json(field(j, "transition"), "transition");
  p.initial_probs = vector_from_json(field(j, "initial_probs"), "initial_probs");
  p.validate();
  return p;
}

Json model_to_json(const EstimatedMsVar& fit) {
  Json se = nullptr;
  if (fit.standard_errors) {
    se = Json::array();
    for (const auto& e : *fit.standard_errors) {
      Json lags = Json::array();
      for (const auto& A : e.lags) lags.push_back(matrix_to_json(A));
      se.push_back({{"intercept", vector_to_json(e.intercept)},
                    {"lags", lags},
                    {"exog", matrix_to_json(e.exog)}});
    }
  }
  return Json{{"format", "msvar-model"},
              {"version", 1},
              {"label", fit.label},
              {"parameters", parameters_to_json(fit.params)},
              {"year_index", fit.year_index},
              {"smoothed_probs", matrix_to_json(fit.smoothed_probs)},
              {"filtered_probs", matrix_to_json(fit.filtered_probs)},
              {"log_likelihood", fit.log_likelihood},
              {"em_trace", fit.em_trace},
              {"converged", fit.converged},
              {"restarts_used", fit.restarts_used},
              {"iterations", fit.iterations},
              {"standard_errors", se},
              {"warnings", fit.warnings}};
}

EstimatedMsVar model_from_json(const Json& j) {
  if (get_as<std::string>(j, "format") != "msvar-model") {
    throw ValidationError("model document: format is not 'msvar-model'");
  }
  if (get_as<int>(j, "version") != 1) throw ValidationError("model document: unsupported version");
  EstimatedMsVar fit;
  fit.label = get_as<std::string>(j, "label");
  fit.params = parameters_from_json(field(j, "parameters"));
  fit.year_index = get_as<std::vector<int>>(j, "year_index");
  fit.smoothed_probs = matrix_from_json(field(j, "smoothed_probs"), "smoothed_probs");
  fit.filtered_probs = matrix_from_json(field(j, "filtered_probs"), "filtered_probs");
  fit.log_likelihood = get_as<double>(j, "log_likelihood");
  fit.em_trace = get_as<std::vector<double>>(j, "em_trace");
  fit.converged = get_as<bool>(j, "converged");
  fit.restarts_used = get_as<int>(j, "restarts_used");
  fit.iterations = get_as<int>(j, "iterations");
  fit.warnings = get_as<std::vector<std::string>>(j, "warnings");
  const auto& se = field(j, "standard_errors");
  if (!se.is_null()) {
    std::vector<CoefficientErrors> out;
    for (const auto& e : se) {
      CoefficientErrors c;
      c.intercept = vector_from_json(field(e, "intercept"), "standard_errors.intercept");
      for (const auto& A : field(e, "lags")) c.lags.push_back(matrix_from_json(A, "standard_errors.lags"));
      c.exog = matrix_from_json(field(e, "exog"), "standard_errors.exog");
      out.push_back(std::move(c));
    }
    fit.standard_errors = std::move(out);
  }
  const auto T = static_cast<Eigen::Index>(fit.year_index.size());
  const auto K = static_cast<Eigen::Index>(fit.params.spec.K());
  if (fit.smoothed_probs.rows() != T || fit.smoothed_probs.cols() != K ||
      fit.filtered_probs.rows() != T || fit.filtered_probs.cols() != K) {
    throw ValidationError("model document: probability matrices do not match year_index and n_regimes");
  }
  return fit;
}

EstimatedMsVar read_model(std::istream& in) {
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model document is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace msvar
