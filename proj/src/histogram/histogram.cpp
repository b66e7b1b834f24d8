#include "histogram/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace photoart {

namespace {

constexpr std::array<const char*, 3> kChannelNames = {"red", "green", "blue"};

// Smallest bin whose cumulative count reaches num/den of the total.
int percentile_bin(const ChannelHistogram& h, std::uint64_t total, std::uint64_t num,
                   std::uint64_t den) {
  std::uint64_t cum = 0;
  for (int b = 0; b < 256; ++b) {
    cum += h[b];
    if (den * cum >= num * total) return b;
  }
  return 255;
}

}  // namespace

HistogramReport compute_histogram(const Image& image) {
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "histogram of a zero-sized image");
  HistogramReport r;
  r.pixel_count = image.pixel_count();
  const auto bytes = image.data();
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    ++r.channels[0][bytes[i]];
    ++r.channels[1][bytes[i + 1]];
    ++r.channels[2][bytes[i + 2]];
  }

  const double n = static_cast<double>(r.pixel_count);
  std::uint64_t midtones = 0;
  for (int c = 0; c < 3; ++c) {
    const auto& h = r.channels[c];
    r.shadow_clip_fraction[c] = static_cast<double>(h[0]) / n;
    r.highlight_clip_fraction[c] = static_cast<double>(h[255]) / n;
    r.black_point[c] = percentile_bin(h, r.pixel_count, 1, 1000);
    r.white_point[c] = percentile_bin(h, r.pixel_count, 999, 1000);
    std::uint64_t sum = 0;
    for (int b = 0; b < 256; ++b) {
      sum += static_cast<std::uint64_t>(b) * h[b];
      if (b >= 64 && b <= 191) midtones += h[b];
    }
    r.channel_means[c] = static_cast<double>(sum) / (n * 255.0);
  }
  r.midtone_fraction = static_cast<double>(midtones) / (3.0 * n);
  r.pooled_mean = (r.channel_means[0] + r.channel_means[1] + r.channel_means[2]) / 3.0;
  r.warm_cool_bias = r.channel_means[0] - r.channel_means[2];

  const auto& m = r.channel_means;
  if (m[0] == m[1] && m[1] == m[2]) {
    r.dominant_channel = "none";
  } else {
    r.dominant_channel = kChannelNames[std::max_element(m.begin(), m.end()) - m.begin()];
  }
  return r;
}

nlohmann::ordered_json to_json_value(const HistogramReport& r) {
  nlohmann::ordered_json j;
  j["pixel_count"] = r.pixel_count;
  nlohmann::ordered_json channels;
  for (int c = 0; c < 3; ++c) {
    nlohmann::ordered_json ch;
    ch["bins"] = r.channels[c];
    ch["shadow_clip_fraction"] = r.shadow_clip_fraction[c];
    ch["highlight_clip_fraction"] = r.highlight_clip_fraction[c];
    ch["black_point"] = r.black_point[c];
    ch["white_point"] = r.white_point[c];
    ch["mean"] = r.channel_means[c];
    channels[kChannelNames[c]] = std::move(ch);
  }
  j["channels"] = std::move(channels);
  j["midtone_fraction"] = r.midtone_fraction;
  j["pooled_mean"] = r.pooled_mean;
  j["dominant_channel"] = r.dominant_channel;
  j["warm_cool_bias"] = r.warm_cool_bias;
  return j;
}

HistogramReport report_from_json(const nlohmann::json& j) {
  try {
    HistogramReport r;
    r.pixel_count = j.at("pixel_count").get<std::uint64_t>();
    for (int c = 0; c < 3; ++c) {
      const auto& ch = j.at("channels").at(kChannelNames[c]);
      const auto bins = ch.at("bins").get<std::vector<std::uint64_t>>();
      if (bins.size() != 256) fail(ErrorCode::kParse, "histogram channel needs 256 bins");
      std::copy(bins.begin(), bins.end(), r.channels[c].begin());
      r.shadow_clip_fraction[c] = ch.at("shadow_clip_fraction").get<double>();
      r.highlight_clip_fraction[c] = ch.at("highlight_clip_fraction").get<double>();
      r.black_point[c] = ch.at("black_point").get<int>();
      r.white_point[c] = ch.at("white_point").get<int>();
      r.channel_means[c] = ch.at("mean").get<double>();
    }
    r.midtone_fraction = j.at("midtone_fraction").get<double>();
    r.pooled_mean = j.at("pooled_mean").get<double>();
    r.dominant_channel = j.at("dominant_channel").get<std::string>();
    r.warm_cool_bias = j.at("warm_cool_bias").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("histogram report: ") + e.what());
  }
}

Image render_histogram_image(const HistogramReport& report) {
  Image plot(kPlotWidth, kPlotHeight);
  std::uint64_t peak = 0;
  for (const auto& h : report.channels) peak = std::max(peak, *std::max_element(h.begin(), h.end()));
  if (peak == 0) return plot;

  for (int c = 0; c < 3; ++c) {
    for (int b = 0; b < 256; ++b) {
      const std::uint64_t count = report.channels[c][b];
      if (count == 0) continue;
      const int height = std::max<int>(1, static_cast<int>(count * kPlotHeight / peak));
      for (int x = 3 * b; x < 3 * b + 3; ++x) {
        for (int y = kPlotHeight - height; y < kPlotHeight; ++y) plot.pixel(x, y)[c] = 255;
      }
    }
  }
  return plot;
}

std::string_view finding_name(ToneFinding f) {
  switch (f) {
    case ToneFinding::kUnderexposed: return "underexposed";
    case ToneFinding::kOverexposed: return "overexposed";
    case ToneFinding::kShadowClipping: return "shadow_clipping";
    case ToneFinding::kHighlightClipping: return "highlight_clipping";
    case ToneFinding::kLowContrast: return "low_contrast";
    case ToneFinding::kHighContrast: return "high_contrast";
    case ToneFinding::kWarmBias: return "warm_bias";
    case ToneFinding::kCoolBias: return "cool_bias";
    case ToneFinding::kGreenBias: return "green_bias";
    case ToneFinding::kMagentaBias: return "magenta_bias";
    case ToneFinding::kBalanced: return "balanced";
  }
  return "unknown";
}

bool ToneFindings::has(ToneFinding f) const {
  return std::any_of(entries.begin(), entries.end(),
                     [f](const ToneFindingEntry& e) { return e.finding == f; });
}

std::vector<std::string> ToneFindings::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.emplace_back(finding_name(e.finding));
  return out;
}

ToneFindings summarize_tone(const HistogramReport& r) {
  using T = ToneThresholds;
  ToneFindings out;
  auto add = [&](ToneFinding f, double v, double t) { out.entries.push_back({f, v, t}); };

  if (r.pooled_mean < T::kUnderexposedMean) {
    add(ToneFinding::kUnderexposed, r.pooled_mean, T::kUnderexposedMean);
  }
  if (r.pooled_mean > T::kOverexposedMean) {
    add(ToneFinding::kOverexposed, r.pooled_mean, T::kOverexposedMean);
  }
  const double shadow_clip =
      *std::max_element(r.shadow_clip_fraction.begin(), r.shadow_clip_fraction.end());
  if (shadow_clip > T::kClipFraction) add(ToneFinding::kShadowClipping, shadow_clip, T::kClipFraction);
  const double highlight_clip =
      *std::max_element(r.highlight_clip_fraction.begin(), r.highlight_clip_fraction.end());
  if (highlight_clip > T::kClipFraction) {
    add(ToneFinding::kHighlightClipping, highlight_clip, T::kClipFraction);
  }

  double width = 0.0;
  for (int c = 0; c < 3; ++c) width += r.white_point[c] - r.black_point[c];
  width /= 3.0;
  const bool low_contrast = width < T::kLowContrastWidth;
  if (low_contrast) add(ToneFinding::kLowContrast, width, T::kLowContrastWidth);
  if (!low_contrast && r.midtone_fraction < T::kHighContrastMidtone) {
    add(ToneFinding::kHighContrast, r.midtone_fraction, T::kHighContrastMidtone);
  }

  if (r.warm_cool_bias > T::kColorBias) add(ToneFinding::kWarmBias, r.warm_cool_bias, T::kColorBias);
  if (r.warm_cool_bias < -T::kColorBias) {
    add(ToneFinding::kCoolBias, r.warm_cool_bias, -T::kColorBias);
  }
  const auto& m = r.channel_means;
  const double green = m[1] - (m[0] + m[2]) / 2.0;
  if (green > T::kColorBias) add(ToneFinding::kGreenBias, green, T::kColorBias);
  if (green < -T::kColorBias) add(ToneFinding::kMagentaBias, green, -T::kColorBias);

  const bool problem = std::any_of(out.entries.begin(), out.entries.end(), [](const auto& e) {
    return e.finding != ToneFinding::kLowContrast && e.finding != ToneFinding::kHighContrast;
  });
  if (!problem) add(ToneFinding::kBalanced, r.pooled_mean, 0.0);
  return out;
}

nlohmann::ordered_json to_json_value(const ToneFindings& findings) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : findings.entries) {
    arr.push_back({{"finding", finding_name(e.finding)}, {"value", e.value}, {"threshold", e.threshold}});
  }
  return arr;
}

std::optional<ToneFinding> finding_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ToneFinding::kBalanced); ++i) {
    if (finding_name(static_cast<ToneFinding>(i)) == name) return static_cast<ToneFinding>(i);
  }
  return std::nullopt;
}

ToneFindings findings_from_json(const nlohmann::json& value) {
  ToneFindings out;
  try {
    for (const auto& e : value) {
      const auto f = finding_from_name(e.at("finding").get<std::string>());
      if (!f) fail(ErrorCode::kParse, "unknown tone finding " + e.at("finding").dump());
      out.entries.push_back({*f, e.at("value").get<double>(), e.at("threshold").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("tone findings: ") + e.what());
  }
  return out;
}

}  // namespace photoart
