#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "supergeo/atlas.hpp"
#include "supergeo/intersection.hpp"
#include "supergeo/orientation.hpp"

// JSON (de)serialization for models, morphisms, submanifolds, and reports.
// The wire schema is documented in docs/model-schema.md.  Malformed input
// raises Parse errors whose message carries a JSON pointer to the offending
// element.

namespace supergeo {

using Json = nlohmann::json;

// Deterministic dump: keys sorted (the backing map already is), no
// whitespace, floating point rendered with 17 significant digits so equal
// inputs give byte-identical output.
std::string dump_json(const Json& j);

// Parse a JSON document from text; Parse error with byte position on failure.
Json parse_json(const std::string& text, const std::string& where);

// Maps a model reference string (registry name, generator spec, or file
// path) to a model; supplied by the caller so this layer stays independent
// of the registry and the generators.
using ModelResolver = std::function<SuperManifoldModel(const std::string&)>;

Json model_to_json(const SuperManifoldModel& model);
SuperManifoldModel model_from_json(const Json& j);

// Morphisms and submanifolds embed their models inline or name them through
// the resolver.
Json morphism_to_json(const MorphismModel& f);
MorphismModel morphism_from_json(const Json& j, const ModelResolver& resolve);

Json submanifold_to_json(const SubmanifoldModel& z);
SubmanifoldModel submanifold_from_json(const Json& j, const ModelResolver& resolve);

// {"per_chart": [[expr, ...], ...]}, one component list per chart of `model`.
VectorField vector_field_from_json(const Json& j, const SuperManifoldModel& model);

Json report_to_json(const IntersectionReport& report);
Json validation_to_json(const ValidationReport& report);
Json classification_to_json(const std::string& model_name, const OrientabilityClass& cls);

}  // namespace supergeo
