#pragma once

#include <string>

#include <json.hpp>

namespace autocore {

// Versioned schema for experiment reports. The canonical copy is embedded so
// validation works without locating files; share/report.schema.json mirrors
// it for external tooling.
extern const char* const kReportSchemaVersion;

nlohmann::json report_schema();

// Validates the subset of JSON Schema the report schema uses: type, required,
// properties, items, enum, additionalProperties. Returns false and fills
// `error` with a path-qualified message on the first violation.
bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* error);

}  // namespace autocore
