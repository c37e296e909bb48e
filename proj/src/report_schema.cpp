#include "autocore/report_schema.hpp"

namespace autocore {

const char* const kReportSchemaVersion = "autocore-report/1";

namespace {

const char* const kSchemaText = R"JSON({
  "$id": "autocore-report/1",
  "type": "object",
  "required": ["schema_version", "config", "results", "aggregates", "timing"],
  "properties": {
    "schema_version": {"type": "string", "enum": ["autocore-report/1"]},
    "config": {
      "type": "object",
      "required": ["task", "backends", "sizes", "trials", "m", "patience",
                   "mode", "error_mode", "max_iterations", "master_seed"],
      "properties": {
        "task": {"type": "string"},
        "backends": {"type": "array", "items": {"type": "string"}},
        "sizes": {"type": "array", "items": {"type": "integer"}},
        "trials": {"type": "integer"},
        "m": {"type": "integer"},
        "patience": {"type": "integer"},
        "mode": {"type": "string", "enum": ["optimal", "last"]},
        "error_mode": {"type": "string", "enum": ["additive", "multiplicative"]},
        "max_iterations": {"type": "integer"},
        "master_seed": {"type": "integer"},
        "standardize": {"type": "boolean"}
      }
    },
    "results": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["backend", "tau", "trial", "seed", "status"],
        "properties": {
          "backend": {"type": "string"},
          "tau": {"type": "integer"},
          "trial": {"type": "integer"},
          "seed": {"type": "integer"},
          "status": {"type": "string", "enum": ["ok", "failed"]},
          "error": {"type": "string"},
          "metrics": {"type": "object"},
          "trace": {
            "type": "object",
            "required": ["best_iteration", "records"],
            "properties": {
              "best_iteration": {"type": "integer"},
              "records": {
                "type": "array",
                "items": {
                  "type": "object",
                  "required": ["column_sum", "vsum_error", "coreset_size",
                               "patience_counter"],
                  "properties": {
                    "column_sum": {"type": "number"},
                    "vsum_error": {"type": "number"},
                    "coreset_size": {"type": "integer"},
                    "patience_counter": {"type": "integer"},
                    "solver_converged": {"type": "boolean"}
                  }
                }
              }
            }
          }
        }
      }
    },
    "aggregates": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["backend", "tau", "metric", "mean", "std"],
        "properties": {
          "backend": {"type": "string"},
          "tau": {"type": "integer"},
          "metric": {"type": "string"},
          "mean": {"type": "number"},
          "std": {"type": "number"}
        }
      }
    },
    "timing": {"type": "object"}
  }
})JSON";

bool type_matches(const nlohmann::json& doc, const std::string& type) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
  if (type == "number") return doc.is_number();
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  return false;
}

bool validate_node(const nlohmann::json& doc, const nlohmann::json& schema,
                   const std::string& path, std::string* error) {
  if (schema.contains("type")) {
    if (!type_matches(doc, schema["type"].get<std::string>())) {
      if (error)
        *error = path + ": expected " + schema["type"].get<std::string>();
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& allowed : schema["enum"])
      if (doc == allowed) found = true;
    if (!found) {
      if (error) *error = path + ": value not in enum";
      return false;
    }
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) {
          if (error) *error = path + ": missing required key '" + key.get<std::string>() + "'";
          return false;
        }
      }
    }
    if (schema.contains("properties")) {
      for (auto it = schema["properties"].begin(); it != schema["properties"].end();
           ++it) {
        if (doc.contains(it.key())) {
          if (!validate_node(doc[it.key()], it.value(), path + "/" + it.key(), error))
            return false;
        }
      }
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (!validate_node(doc[i], schema["items"],
                         path + "[" + std::to_string(i) + "]", error))
        return false;
    }
  }
  return true;
}

}  // namespace

nlohmann::json report_schema() { return nlohmann::json::parse(kSchemaText); }

bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* error) {
  return validate_node(doc, schema, "", error);
}

}  // namespace autocore
