#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engine/image.hpp"
#include "json.hpp"

namespace photoart {

using ChannelHistogram = std::array<std::uint64_t, 256>;

struct HistogramReport {
  std::uint64_t pixel_count = 0;
  std::array<ChannelHistogram, 3> channels{};  // R, G, B
  std::array<double, 3> shadow_clip_fraction{};
  std::array<double, 3> highlight_clip_fraction{};
  std::array<int, 3> black_point{};  // 0.1% percentile bin
  std::array<int, 3> white_point{};  // 99.9% percentile bin
  double midtone_fraction = 0.0;     // bins 64..191, channels pooled
  std::array<double, 3> channel_means{};  // [0,1]
  double pooled_mean = 0.0;
  std::string dominant_channel;  // "red", "green", "blue" or "none"
  double warm_cool_bias = 0.0;   // meanR - meanB

  bool operator==(const HistogramReport&) const = default;
};

HistogramReport compute_histogram(const Image& image);

nlohmann::ordered_json to_json_value(const HistogramReport& report);
HistogramReport report_from_json(const nlohmann::json& value);

inline constexpr int kPlotWidth = 768;
inline constexpr int kPlotHeight = 256;

/// Overlaid RGB bar plot, 3 px per bin; each channel lights its own color
/// component so overlaps mix additively.
Image render_histogram_image(const HistogramReport& report);

enum class ToneFinding {
  kUnderexposed,
  kOverexposed,
  kShadowClipping,
  kHighlightClipping,
  kLowContrast,
  kHighContrast,
  kWarmBias,
  kCoolBias,
  kGreenBias,
  kMagentaBias,
  kBalanced,
};

std::string_view finding_name(ToneFinding finding);

struct ToneFindingEntry {
  ToneFinding finding;
  double value;      // triggering feature value
  double threshold;  // threshold it was compared against
};

struct ToneFindings {
  std::vector<ToneFindingEntry> entries;

  bool has(ToneFinding f) const;
  std::vector<std::string> names() const;
};

// Thresholds used by summarize_tone.
struct ToneThresholds {
  static constexpr double kUnderexposedMean = 96.0 / 255.0;
  static constexpr double kOverexposedMean = 176.0 / 255.0;
  static constexpr double kClipFraction = 0.01;
  static constexpr double kLowContrastWidth = 128.0;  // bins
  static constexpr double kHighContrastMidtone = 0.3;
  static constexpr double kColorBias = 0.06;
};

ToneFindings summarize_tone(const HistogramReport& report);

nlohmann::ordered_json to_json_value(const ToneFindings& findings);
ToneFindings findings_from_json(const nlohmann::json& value);
std::optional<ToneFinding> finding_from_name(std::string_view name);

}  // namespace photoart
