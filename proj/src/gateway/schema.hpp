#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace photoart {

/// Validator for the JSON Schema subset the structured stages use: type,
/// properties, required, additionalProperties (boolean), items, minItems,
/// maxItems, minimum, maximum, enum, minLength, maxLength and $ref by id.
class SchemaRegistry {
 public:
  // Registry preloaded with every embedded schema.
  static const SchemaRegistry& builtin();

  void add(nlohmann::json schema);  // keyed by its "$id"
  bool contains(std::string_view id) const;
  const nlohmann::json& get(std::string_view id) const;

  // Schema with every $ref replaced by the referenced body, for backends that
  // need a self-contained schema.
  nlohmann::json resolved(std::string_view id) const;

  // Empty when `value` conforms; otherwise one message per problem, each
  // prefixed with the JSON pointer of the offending value.
  std::vector<std::string> validate(std::string_view id, const nlohmann::json& value) const;

 private:
  void check(const nlohmann::json& schema, const nlohmann::json& value, const std::string& where,
             std::vector<std::string>& errors) const;
  nlohmann::json inline_refs(const nlohmann::json& schema, int depth) const;

  std::map<std::string, nlohmann::json, std::less<>> schemas_;
};

}  // namespace photoart
