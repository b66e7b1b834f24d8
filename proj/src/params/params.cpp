#include "params/params.hpp"

#include <cmath>
#include <sstream>

#include "common/error.hpp"

namespace photoart {

namespace {

constexpr std::array<std::string_view, kHslChannelCount> kChannelNames = {
    "red", "orange", "yellow", "green", "cyan", "blue", "purple", "magenta"};

constexpr std::array<std::string_view, 10> kBasicNames = {
    "exposure", "contrast", "highlights", "shadows", "whites",
    "blacks",   "temp",     "tint",       "vibrance", "saturation"};

constexpr std::array<std::string_view, 3> kChannelFieldNames = {"hue", "saturation",
                                                                "luminance"};

std::vector<FieldInfo> build_fields() {
  std::vector<FieldInfo> fields;
  fields.reserve(kParamFieldCount);
  for (auto name : kBasicNames) {
    FieldInfo f{"basic." + std::string(name), -100.0, 100.0, 0.0};
    if (name == "exposure") {
      f.min = -5.0;
      f.max = 5.0;
    } else if (name == "temp") {
      f.min = 2000.0;
      f.max = 50000.0;
      f.identity = 6500.0;
    } else if (name == "tint") {
      f.min = -150.0;
      f.max = 150.0;
    }
    fields.push_back(std::move(f));
  }
  for (auto channel : kChannelNames) {
    for (auto field : kChannelFieldNames) {
      fields.push_back({"mixer." + std::string(channel) + "." + std::string(field), -100.0,
                        100.0, 0.0});
    }
  }
  return fields;
}

const std::vector<FieldInfo>& fields_table() {
  static const std::vector<FieldInfo> table = build_fields();
  return table;
}

template <class Json>
Json number(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::fabs(v) < 9.0e15 &&
      !(v == 0.0 && std::signbit(v))) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

nlohmann::ordered_json onum(double v) { return number<nlohmann::ordered_json>(v); }

double read_number(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number()) fail(ErrorCode::kParse, "field '" + path + "' must be a number");
  return value.get<double>();
}

}  // namespace

std::string_view channel_name(HslChannel channel) {
  return kChannelNames[static_cast<std::size_t>(channel)];
}

std::optional<HslChannel> channel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
    if (kChannelNames[i] == name) return static_cast<HslChannel>(i);
  }
  return std::nullopt;
}

bool HslMixer::is_zero() const {
  for (const auto& c : channels) {
    if (!c.is_zero()) return false;
  }
  return true;
}

std::span<const FieldInfo> param_fields() { return fields_table(); }

std::optional<std::size_t> field_index(std::string_view path) {
  const auto& table = fields_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].path == path) return i;
  }
  return std::nullopt;
}

double& field_ref(RetouchParams& p, std::size_t index) {
  auto& b = p.basic;
  switch (index) {
    case 0: return b.exposure;
    case 1: return b.contrast;
    case 2: return b.highlights;
    case 3: return b.shadows;
    case 4: return b.whites;
    case 5: return b.blacks;
    case 6: return b.temp;
    case 7: return b.tint;
    case 8: return b.vibrance;
    case 9: return b.saturation;
    default: break;
  }
  if (index >= kParamFieldCount) fail(ErrorCode::kInvalidArgument, "field index out of range");
  auto& ch = p.mixer.channels[(index - 10) / 3];
  switch ((index - 10) % 3) {
    case 0: return ch.hue;
    case 1: return ch.saturation;
    default: return ch.luminance;
  }
}

double field_value(const RetouchParams& params, std::size_t index) {
  return field_ref(const_cast<RetouchParams&>(params), index);
}

std::string ValidationResult::message() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    os << v.field << "=" << v.value << " outside [" << v.min << ", " << v.max << "]";
  }
  return os.str();
}

ValidationResult validate(const RetouchParams& params) {
  ValidationResult result;
  const auto& table = fields_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double v = field_value(params, i);
    if (!std::isfinite(v) || v < table[i].min || v > table[i].max) {
      result.violations.push_back({table[i].path, v, table[i].min, table[i].max});
    }
  }
  return result;
}

nlohmann::ordered_json to_json_value(const RetouchParams& params) {
  nlohmann::ordered_json basic = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kBasicNames.size(); ++i) {
    basic[std::string(kBasicNames[i])] = onum(field_value(params, i));
  }
  nlohmann::ordered_json mixer = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < kHslChannelCount; ++c) {
    const auto& ch = params.mixer.channels[c];
    mixer[std::string(kChannelNames[c])] = {
        {"hue", onum(ch.hue)}, {"saturation", onum(ch.saturation)}, {"luminance", onum(ch.luminance)}};
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  out["basic"] = std::move(basic);
  out["mixer"] = std::move(mixer);
  return out;
}

std::string to_json(const RetouchParams& params) { return to_json_value(params).dump(); }

ParsedParams from_json_value(const nlohmann::json& root) {
  if (!root.is_object()) fail(ErrorCode::kParse, "parameter document must be a JSON object");
  ParsedParams out;
  std::array<bool, kParamFieldCount> seen{};

  for (const auto& [key, value] : root.items()) {
    if (key == "basic") {
      if (!value.is_object()) fail(ErrorCode::kParse, "'basic' must be an object");
      for (const auto& [name, v] : value.items()) {
        auto idx = field_index("basic." + name);
        if (!idx) fail(ErrorCode::kParse, "unknown key 'basic." + name + "'");
        field_ref(out.params, *idx) = read_number(v, "basic." + name);
        seen[*idx] = true;
      }
    } else if (key == "mixer") {
      if (!value.is_object()) fail(ErrorCode::kParse, "'mixer' must be an object");
      for (const auto& [channel, adj] : value.items()) {
        if (!channel_from_name(channel)) {
          fail(ErrorCode::kParse, "unknown key 'mixer." + channel + "'");
        }
        if (!adj.is_object()) {
          fail(ErrorCode::kParse, "'mixer." + channel + "' must be an object");
        }
        for (const auto& [name, v] : adj.items()) {
          const std::string path = "mixer." + channel + "." + name;
          auto idx = field_index(path);
          if (!idx) fail(ErrorCode::kParse, "unknown key '" + path + "'");
          field_ref(out.params, *idx) = read_number(v, path);
          seen[*idx] = true;
        }
      }
    } else {
      fail(ErrorCode::kParse, "unknown key '" + key + "'");
    }
  }

  const auto& table = fields_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!seen[i]) out.defaulted.push_back(table[i].path);
  }
  if (auto v = validate(out.params); !v.ok()) fail(ErrorCode::kValidation, v.message());
  return out;
}

ParsedParams from_json(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    fail(ErrorCode::kParse, "malformed JSON at line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ": " + e.what());
  }
  return from_json_value(root);
}

ParamDiff diff(const RetouchParams& from, const RetouchParams& to) {
  ParamDiff out;
  const auto& table = fields_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double a = field_value(from, i);
    const double b = field_value(to, i);
    if (a != b || std::signbit(a) != std::signbit(b)) {
      out.changes.push_back({table[i].path, a, b});
    }
  }
  return out;
}

RetouchParams apply(RetouchParams base, const ParamDiff& changes) {
  for (const auto& c : changes.changes) {
    auto idx = field_index(c.field);
    if (!idx) fail(ErrorCode::kInvalidArgument, "unknown field in diff: " + c.field);
    field_ref(base, *idx) = c.new_value;
  }
  return base;
}

nlohmann::json diff_to_json(const ParamDiff& changes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : changes.changes) {
    out.push_back({{"field", c.field},
                   {"old", number<nlohmann::json>(c.old_value)},
                   {"new", number<nlohmann::json>(c.new_value)}});
  }
  return out;
}

}  // namespace photoart
