#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace photoart {

enum class HslChannel : std::uint8_t {
  kRed,
  kOrange,
  kYellow,
  kGreen,
  kCyan,
  kBlue,
  kPurple,
  kMagenta,
};

inline constexpr std::size_t kHslChannelCount = 8;

std::string_view channel_name(HslChannel channel);
std::optional<HslChannel> channel_from_name(std::string_view name);

struct BasicAdjustments {
  double exposure = 0.0;  // EV stops
  double contrast = 0.0;
  double highlights = 0.0;
  double shadows = 0.0;
  double whites = 0.0;
  double blacks = 0.0;
  double temp = 6500.0;  // Kelvin
  double tint = 0.0;     // positive = magenta
  double vibrance = 0.0;
  double saturation = 0.0;

  bool operator==(const BasicAdjustments&) const = default;
};

struct HslChannelAdjustment {
  double hue = 0.0;
  double saturation = 0.0;
  double luminance = 0.0;

  bool is_zero() const { return hue == 0.0 && saturation == 0.0 && luminance == 0.0; }
  bool operator==(const HslChannelAdjustment&) const = default;
};

struct HslMixer {
  std::array<HslChannelAdjustment, kHslChannelCount> channels{};

  HslChannelAdjustment& operator[](HslChannel c) { return channels[static_cast<std::size_t>(c)]; }
  const HslChannelAdjustment& operator[](HslChannel c) const {
    return channels[static_cast<std::size_t>(c)];
  }
  bool is_zero() const;
  bool operator==(const HslMixer&) const = default;
};

/// The absolute parameter set of one iteration. Default-constructed value is
/// the identity (renders a pixel-identical image).
struct RetouchParams {
  BasicAdjustments basic;
  HslMixer mixer;

  static RetouchParams identity() { return {}; }
  bool is_identity() const { return *this == identity(); }
  bool operator==(const RetouchParams&) const = default;
};

// Every scalar in RetouchParams, in canonical order: the ten basic sliders,
// then hue/saturation/luminance for each mixer channel.
struct FieldInfo {
  std::string path;  // e.g. "basic.exposure", "mixer.blue.luminance"
  double min;
  double max;
  double identity;
};

inline constexpr std::size_t kParamFieldCount = 10 + 3 * kHslChannelCount;

std::span<const FieldInfo> param_fields();
std::optional<std::size_t> field_index(std::string_view path);
double field_value(const RetouchParams& params, std::size_t index);
double& field_ref(RetouchParams& params, std::size_t index);

struct Violation {
  std::string field;
  double value;
  double min;
  double max;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string message() const;
};

ValidationResult validate(const RetouchParams& params);

// Canonical JSON: {"basic":{...},"mixer":{"red":{...},...}} in fixed key
// order; integral values are written without a fractional part.
nlohmann::ordered_json to_json_value(const RetouchParams& params);
std::string to_json(const RetouchParams& params);

struct ParsedParams {
  RetouchParams params;
  std::vector<std::string> defaulted;  // field paths absent from the input
};

// Throws Error(kParse) for malformed JSON, wrong types, or unknown keys, and
// Error(kValidation) when the parsed set violates a range.
ParsedParams from_json(std::string_view text);
ParsedParams from_json_value(const nlohmann::json& value);

struct ParamChange {
  std::string field;
  double old_value;
  double new_value;

  bool operator==(const ParamChange&) const = default;
};

struct ParamDiff {
  std::vector<ParamChange> changes;

  bool empty() const { return changes.empty(); }
};

ParamDiff diff(const RetouchParams& from, const RetouchParams& to);
RetouchParams apply(RetouchParams base, const ParamDiff& changes);
nlohmann::json diff_to_json(const ParamDiff& changes);

}  // namespace photoart
