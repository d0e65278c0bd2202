#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace caafc {

using Json = nlohmann::json;

// Registered structured-output schema names.
const std::vector<std::string>& registered_schemas();

// Checks `value` against the named schema and returns it in canonical shape
// (list wrappers added, enum strings lowercased, optional fields defaulted).
// Throws SchemaViolation naming the first failing field; throws
// InvariantViolation for an unregistered schema name.
Json validate_schema(const std::string& schema_name, const Json& value);

// Locates the first syntactically valid JSON object/array embedded in
// raw_text (code fences and surrounding prose are skipped by construction),
// validates it against the named schema, and returns the canonical value.
// Throws NoJsonFound when raw_text holds no parseable JSON value.
Json extract_json(const std::string& raw_text, const std::string& schema_name);

}  // namespace caafc
