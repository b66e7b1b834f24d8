#pragma once

#include <array>
#include <chrono>
#include <string>
#include <vector>

#include "engine/image.hpp"
#include "params/params.hpp"

namespace photoart {

struct RenderStage {
  std::string name;
  std::chrono::microseconds elapsed{0};
  std::string summary;  // parameter values the stage ran with, or "skipped"
};

/// Stage log of one render, in pipeline order.
struct RenderTrace {
  std::vector<RenderStage> stages;

  std::string describe() const;
};

struct RenderResult {
  Image image;
  RenderTrace trace;
};

// Fixed pipeline order of every render.
inline constexpr std::array<const char*, 7> kRenderStageNames = {
    "decode", "white_balance", "exposure", "tone", "presence", "hsl_mixer", "encode"};

/// Deterministic render of `params` onto an 8-bit sRGB source. Identity
/// params reproduce the source bit-exactly.
RenderResult render(const Image& source, const RetouchParams& params);

FloatImage decode_to_linear(const Image& source);
FloatImage linear_to_gamma(const FloatImage& linear);
Image encode_gamma(const FloatImage& gamma);

/// Per-channel multipliers. (6500 K, tint 0) is exactly (1, 1, 1); the red and
/// blue gains follow neutral(6500)/target(temp) normalized to the green gain,
/// and tint scales green alone by (1 - tint/300).
std::array<double, 3> white_balance_gains(double temp, double tint);

void apply_white_balance(FloatImage& linear, const std::array<double, 3>& gains);
void apply_exposure(FloatImage& linear, double ev);

struct ToneSliders {
  double blacks = 0.0;
  double whites = 0.0;
  double shadows = 0.0;
  double highlights = 0.0;
  double contrast = 0.0;

  bool is_zero() const {
    return blacks == 0.0 && whites == 0.0 && shadows == 0.0 && highlights == 0.0 &&
           contrast == 0.0;
  }
};

/// Scalar tone mapping on gamma-encoded luminance. Non-decreasing in `value`
/// for every slider set within range.
double tone_curve(double value, const ToneSliders& sliders);

// Edits luminance only; RGB ratios are kept in linear light.
void apply_tone_block(FloatImage& gamma, const ToneSliders& sliders);

void apply_presence(FloatImage& gamma, double vibrance, double saturation);

/// Normalized membership of `hue_degrees` in each of the eight mixer windows.
std::array<double, kHslChannelCount> mixer_weights(double hue_degrees);

void apply_hsl_mixer(FloatImage& gamma, const HslMixer& mixer);

}  // namespace photoart
