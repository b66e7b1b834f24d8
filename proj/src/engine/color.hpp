#pragma once

#include <array>
#include <cstdint>

namespace photoart {

// sRGB transfer, extended past 1.0 with the same power segment.
double srgb_to_linear(double encoded);
double linear_to_srgb(double linear);

/// Exact decode of every 8-bit code value to linear light.
const std::array<float, 256>& srgb8_to_linear_table();

/// Rounds half to even after clamping to [0,1].
std::uint8_t quantize_unit(double value);

// Rec.709 weights, applied to linear-light RGB.
inline double rec709_luminance(double r, double g, double b) {
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

struct Hsl {
  double h;  // degrees [0, 360)
  double s;  // [0, 1]
  double l;  // [0, 1]
};

// Inputs in [0,1]. Achromatic colors get h = 0, s = 0.
Hsl rgb_to_hsl(double r, double g, double b);
std::array<double, 3> hsl_to_rgb(const Hsl& hsl);

/// Normalized RGB of a blackbody-like source at the given temperature,
/// piecewise polynomial/log fit evaluated on T/100.
std::array<double, 3> kelvin_to_rgb(double kelvin);

}  // namespace photoart
