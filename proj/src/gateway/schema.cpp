#include "gateway/schema.hpp"

#include <cmath>

#include "common/assets.hpp"
#include "common/error.hpp"

namespace photoart {

namespace {

bool type_matches(std::string_view type, const nlohmann::json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") {
    return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  }
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::string pointer_child(const std::string& where, const std::string& key) {
  return where + "/" + key;
}

}  // namespace

const SchemaRegistry& SchemaRegistry::builtin() {
  static const SchemaRegistry registry = [] {
    SchemaRegistry r;
    for (const auto& asset : embedded_assets()) {
      if (asset.name.starts_with("schemas/")) r.add(nlohmann::json::parse(asset.content));
    }
    return r;
  }();
  return registry;
}

void SchemaRegistry::add(nlohmann::json schema) {
  if (!schema.is_object() || !schema.contains("$id") || !schema["$id"].is_string()) {
    fail(ErrorCode::kInvalidArgument, "schema without a string $id");
  }
  auto id = schema["$id"].get<std::string>();
  schemas_.insert_or_assign(std::move(id), std::move(schema));
}

bool SchemaRegistry::contains(std::string_view id) const { return schemas_.find(id) != schemas_.end(); }

const nlohmann::json& SchemaRegistry::get(std::string_view id) const {
  auto it = schemas_.find(id);
  if (it == schemas_.end()) fail(ErrorCode::kInvalidArgument, "unknown schema '" + std::string(id) + "'");
  return it->second;
}

nlohmann::json SchemaRegistry::inline_refs(const nlohmann::json& schema, int depth) const {
  if (depth > 32) fail(ErrorCode::kInvalidArgument, "schema $ref nesting too deep");
  if (schema.is_object()) {
    if (auto ref = schema.find("$ref"); ref != schema.end()) {
      auto body = inline_refs(get(ref->get<std::string>()), depth + 1);
      body.erase("$id");
      return body;
    }
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : schema.items()) out[k] = inline_refs(v, depth + 1);
    return out;
  }
  if (schema.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : schema) out.push_back(inline_refs(v, depth + 1));
    return out;
  }
  return schema;
}

nlohmann::json SchemaRegistry::resolved(std::string_view id) const {
  auto out = inline_refs(get(id), 0);
  out.erase("$id");
  return out;
}

std::vector<std::string> SchemaRegistry::validate(std::string_view id, const nlohmann::json& value) const {
  std::vector<std::string> errors;
  check(get(id), value, "", errors);
  return errors;
}

void SchemaRegistry::check(const nlohmann::json& schema, const nlohmann::json& value,
                           const std::string& where, std::vector<std::string>& errors) const {
  const std::string at = where.empty() ? "/" : where;
  if (auto ref = schema.find("$ref"); ref != schema.end()) {
    check(get(ref->get<std::string>()), value, where, errors);
    return;
  }
  if (auto type = schema.find("type"); type != schema.end()) {
    if (!type_matches(type->get<std::string>(), value)) {
      errors.push_back(at + ": expected " + type->get<std::string>());
      return;
    }
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& option : *e) found = found || option == value;
    if (!found) errors.push_back(at + ": " + value.dump() + " is not one of " + e->dump());
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (auto m = schema.find("minimum"); m != schema.end() && v < m->get<double>()) {
      errors.push_back(at + ": " + value.dump() + " below minimum " + m->dump());
    }
    if (auto m = schema.find("maximum"); m != schema.end() && v > m->get<double>()) {
      errors.push_back(at + ": " + value.dump() + " above maximum " + m->dump());
    }
  }
  if (value.is_string()) {
    const auto len = utf8_length(value.get_ref<const std::string&>());
    if (auto m = schema.find("minLength"); m != schema.end() && len < m->get<std::size_t>()) {
      errors.push_back(at + ": string shorter than " + m->dump());
    }
    if (auto m = schema.find("maxLength"); m != schema.end() && len > m->get<std::size_t>()) {
      errors.push_back(at + ": string longer than " + m->dump());
    }
  }
  if (value.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() && value.size() < m->get<std::size_t>()) {
      errors.push_back(at + ": fewer than " + m->dump() + " items");
    }
    if (auto m = schema.find("maxItems"); m != schema.end() && value.size() > m->get<std::size_t>()) {
      errors.push_back(at + ": more than " + m->dump() + " items");
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        check(*items, value[i], pointer_child(where, std::to_string(i)), errors);
      }
    }
  }
  if (value.is_object()) {
    const auto props = schema.find("properties");
    if (auto req = schema.find("required"); req != schema.end()) {
      for (const auto& name : *req) {
        if (!value.contains(name.get<std::string>())) {
          errors.push_back(at + ": missing required '" + name.get<std::string>() + "'");
        }
      }
    }
    const auto extra = schema.find("additionalProperties");
    const bool closed = extra != schema.end() && extra->is_boolean() && !extra->get<bool>();
    for (const auto& [k, v] : value.items()) {
      if (props != schema.end() && props->contains(k)) {
        check((*props)[k], v, pointer_child(where, k), errors);
      } else if (closed) {
        errors.push_back(at + ": unexpected property '" + k + "'");
      }
    }
  }
}

}  // namespace photoart
