#include "engine/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common/error.hpp"
#include "engine/color.hpp"

namespace photoart {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<double, kHslChannelCount> kWindowCenters = {0.0,   30.0,  60.0,  120.0,
                                                                 180.0, 240.0, 280.0, 320.0};
constexpr double kWindowHalfWidth = 45.0;
constexpr double kHueShiftDegrees = 30.0;  // at slider +/-100

double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

template <class Fn>
void for_each_pixel(FloatImage& img, Fn&& fn) {
  float* p = img.rgb.data();
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i, p += 3) fn(p);
}

}  // namespace

std::string RenderTrace::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) os << "; ";
    os << stages[i].name << ": " << stages[i].summary;
  }
  return os.str();
}

FloatImage decode_to_linear(const Image& source) {
  FloatImage out{source.width(), source.height(), Transfer::kLinear, {}};
  const auto& lut = srgb8_to_linear_table();
  const auto bytes = source.data();
  out.rgb.resize(bytes.size());
  std::transform(bytes.begin(), bytes.end(), out.rgb.begin(),
                 [&](std::uint8_t v) { return lut[v]; });
  return out;
}

FloatImage linear_to_gamma(const FloatImage& linear) {
  FloatImage out{linear.width, linear.height, Transfer::kGamma, {}};
  out.rgb.resize(linear.rgb.size());
  std::transform(linear.rgb.begin(), linear.rgb.end(), out.rgb.begin(), [](float v) {
    return static_cast<float>(linear_to_srgb(std::max(0.0, static_cast<double>(v))));
  });
  return out;
}

Image encode_gamma(const FloatImage& gamma) {
  std::vector<std::uint8_t> bytes(gamma.rgb.size());
  std::transform(gamma.rgb.begin(), gamma.rgb.end(), bytes.begin(),
                 [](float v) { return quantize_unit(v); });
  return Image(gamma.width, gamma.height, std::move(bytes));
}

std::array<double, 3> white_balance_gains(double temp, double tint) {
  if (!(temp >= 2000.0 && temp <= 50000.0)) {
    fail(ErrorCode::kValidation, "temp " + fmt(temp) + " outside [2000, 50000]");
  }
  if (!(tint >= -150.0 && tint <= 150.0)) {
    fail(ErrorCode::kValidation, "tint " + fmt(tint) + " outside [-150, 150]");
  }
  const auto neutral = kelvin_to_rgb(6500.0);
  const auto target = kelvin_to_rgb(temp);
  std::array<double, 3> raw{};
  for (int c = 0; c < 3; ++c) raw[c] = neutral[c] / target[c];
  return {raw[0] / raw[1], 1.0 - tint / 300.0, raw[2] / raw[1]};
}

void apply_white_balance(FloatImage& linear, const std::array<double, 3>& gains) {
  const std::array<float, 3> g = {static_cast<float>(gains[0]), static_cast<float>(gains[1]),
                                  static_cast<float>(gains[2])};
  for_each_pixel(linear, [&](float* p) {
    p[0] *= g[0];
    p[1] *= g[1];
    p[2] *= g[2];
  });
}

void apply_exposure(FloatImage& linear, double ev) {
  const float k = static_cast<float>(std::exp2(ev));
  for (float& v : linear.rgb) v *= k;
}

double tone_curve(double x, const ToneSliders& s) {
  // Endpoint remap.
  const double black = -0.25 * s.blacks / 100.0;
  const double white = 1.0 - 0.25 * s.whites / 100.0;
  x = std::max(0.0, (x - black) / (white - black));

  // Shadows: lift proportional to the value under a mask fading out by 0.5.
  const double ks = 0.5 * s.shadows / 100.0;
  x += ks * x * (1.0 - smoothstep(0.0, 0.5, x));

  // Highlights: pull toward/away from 1 under a mask rising from 0.5; values
  // above 1 are scaled about 1.
  const double kh = 0.5 * s.highlights / 100.0;
  if (x <= 1.0) {
    x += kh * (1.0 - x) * smoothstep(0.5, 1.0, x);
  } else {
    x = 1.0 + (x - 1.0) * (1.0 + kh);
  }

  x = 0.5 + (x - 0.5) * (1.0 + s.contrast / 100.0);
  return std::max(0.0, x);
}

void apply_tone_block(FloatImage& gamma, const ToneSliders& sliders) {
  if (sliders.is_zero()) return;
  for_each_pixel(gamma, [&](float* p) {
    const double r = srgb_to_linear(std::max(0.0f, p[0]));
    const double g = srgb_to_linear(std::max(0.0f, p[1]));
    const double b = srgb_to_linear(std::max(0.0f, p[2]));
    const double y = rec709_luminance(r, g, b);
    const double y2 = srgb_to_linear(tone_curve(linear_to_srgb(y), sliders));
    std::array<double, 3> out;
    if (y > 0.0) {
      const double k = y2 / y;
      out = {r * k, g * k, b * k};
    } else {
      out = {y2, y2, y2};
    }
    for (int c = 0; c < 3; ++c) p[c] = static_cast<float>(linear_to_srgb(out[c]));
  });
}

void apply_presence(FloatImage& gamma, double vibrance, double saturation) {
  if (vibrance == 0.0 && saturation == 0.0) return;
  const double kv = vibrance / 100.0;
  const double ks = 1.0 + saturation / 100.0;
  for_each_pixel(gamma, [&](float* p) {
    Hsl hsl = rgb_to_hsl(std::clamp<double>(p[0], 0.0, 1.0), std::clamp<double>(p[1], 0.0, 1.0),
                         std::clamp<double>(p[2], 0.0, 1.0));
    double s = hsl.s * (1.0 + kv * (1.0 - hsl.s));
    hsl.s = std::clamp(s * ks, 0.0, 1.0);
    const auto rgb = hsl_to_rgb(hsl);
    for (int c = 0; c < 3; ++c) p[c] = static_cast<float>(rgb[c]);
  });
}

std::array<double, kHslChannelCount> mixer_weights(double hue) {
  std::array<double, kHslChannelCount> w{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kHslChannelCount; ++i) {
    const double center = kWindowCenters[i];
    const double prev = kWindowCenters[(i + kHslChannelCount - 1) % kHslChannelCount];
    const double next = kWindowCenters[(i + 1) % kHslChannelCount];
    const double gap_prev = std::fmod(center - prev + 360.0, 360.0);
    const double gap_next = std::fmod(next - center + 360.0, 360.0);
    // Signed hue distance in (-180, 180].
    const double d = std::fmod(hue - center + 540.0, 360.0) - 180.0;
    const double half = std::min(kWindowHalfWidth, d >= 0.0 ? gap_next : gap_prev);
    w[i] = std::max(0.0, 1.0 - std::fabs(d) / half);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

void apply_hsl_mixer(FloatImage& gamma, const HslMixer& mixer) {
  if (mixer.is_zero()) return;
  for_each_pixel(gamma, [&](float* p) {
    Hsl hsl = rgb_to_hsl(std::clamp<double>(p[0], 0.0, 1.0), std::clamp<double>(p[1], 0.0, 1.0),
                         std::clamp<double>(p[2], 0.0, 1.0));
    if (hsl.s == 0.0) return;  // no hue: no window applies
    const auto w = mixer_weights(hsl.h);
    double dh = 0.0, ds = 0.0, dl = 0.0;
    for (std::size_t i = 0; i < kHslChannelCount; ++i) {
      if (w[i] == 0.0) continue;
      const auto& adj = mixer.channels[i];
      dh += w[i] * adj.hue / 100.0 * kHueShiftDegrees;
      ds += w[i] * adj.saturation / 100.0;
      dl += w[i] * adj.luminance / 100.0;
    }
    const double s = hsl.s;
    hsl.h = std::fmod(hsl.h + dh + 360.0, 360.0);
    hsl.s = std::clamp(s * (1.0 + ds), 0.0, 1.0);
    hsl.l = std::clamp(hsl.l * (1.0 + s * dl), 0.0, 1.0);
    const auto rgb = hsl_to_rgb(hsl);
    for (int c = 0; c < 3; ++c) p[c] = static_cast<float>(rgb[c]);
  });
}

RenderResult render(const Image& source, const RetouchParams& params) {
  if (source.empty()) fail(ErrorCode::kInvalidArgument, "cannot render a zero-sized image");
  if (auto v = validate(params); !v.ok()) fail(ErrorCode::kValidation, v.message());

  RenderResult result;
  auto& stages = result.trace.stages;
  const auto& b = params.basic;
  auto timed = [&](const char* name, std::string summary, auto&& fn) {
    const auto t0 = Clock::now();
    fn();
    stages.push_back({name, std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0),
                      std::move(summary)});
  };

  FloatImage linear;
  timed("decode", std::to_string(source.width()) + "x" + std::to_string(source.height()),
        [&] { linear = decode_to_linear(source); });

  const bool neutral_wb = b.temp == 6500.0 && b.tint == 0.0;
  const auto gains = white_balance_gains(b.temp, b.tint);
  timed("white_balance",
        neutral_wb ? std::string("skipped")
                   : "temp=" + fmt(b.temp) + " tint=" + fmt(b.tint) + " gains=(" +
                         fmt(gains[0]) + ", " + fmt(gains[1]) + ", " + fmt(gains[2]) + ")",
        [&] {
          if (!neutral_wb) apply_white_balance(linear, gains);
        });

  timed("exposure", b.exposure == 0.0 ? std::string("skipped") : "ev=" + fmt(b.exposure),
        [&] {
          if (b.exposure != 0.0) apply_exposure(linear, b.exposure);
        });

  FloatImage gamma = linear_to_gamma(linear);
  const ToneSliders tone{b.blacks, b.whites, b.shadows, b.highlights, b.contrast};
  timed("tone",
        tone.is_zero() ? std::string("skipped")
                       : "blacks=" + fmt(b.blacks) + " whites=" + fmt(b.whites) +
                             " shadows=" + fmt(b.shadows) + " highlights=" + fmt(b.highlights) +
                             " contrast=" + fmt(b.contrast),
        [&] { apply_tone_block(gamma, tone); });

  timed("presence",
        (b.vibrance == 0.0 && b.saturation == 0.0)
            ? std::string("skipped")
            : "vibrance=" + fmt(b.vibrance) + " saturation=" + fmt(b.saturation),
        [&] { apply_presence(gamma, b.vibrance, b.saturation); });

  std::string mixer_summary;
  for (std::size_t i = 0; i < kHslChannelCount; ++i) {
    const auto& c = params.mixer.channels[i];
    if (c.is_zero()) continue;
    if (!mixer_summary.empty()) mixer_summary += " ";
    mixer_summary += std::string(channel_name(static_cast<HslChannel>(i))) + "(" + fmt(c.hue) +
                     "," + fmt(c.saturation) + "," + fmt(c.luminance) + ")";
  }
  timed("hsl_mixer", mixer_summary.empty() ? std::string("skipped") : mixer_summary,
        [&] { apply_hsl_mixer(gamma, params.mixer); });

  timed("encode", "sRGB 8-bit", [&] { result.image = encode_gamma(gamma); });
  return result;
}

}  // namespace photoart
