#pragma once

#include "msvar/model.hpp"

#include <json.hpp>

#include <iosfwd>

namespace msvar {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j, const char* what);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);

Json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const Json& j);

Json parameters_to_json(const MsVarParameters& params);
MsVarParameters parameters_from_json(const Json& j);

/// Self-describing model document: format "msvar-model", version 1.
/// Doubles are written in shortest round-trip form, so reading back
/// reproduces every value bit for bit.
Json model_to_json(const EstimatedMsVar& fit);
EstimatedMsVar model_from_json(const Json& j);

/// Parses and validates a model document; throws IoError on malformed JSON
/// and ValidationError on a structurally invalid model.
EstimatedMsVar read_model(std::istream& in);

}  // namespace msvar
