#include "engine/color.hpp"

#include <algorithm>
#include <cmath>

namespace photoart {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double x) {
  return x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

const std::array<float, 256>& srgb8_to_linear_table() {
  static const std::array<float, 256> table = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = static_cast<float>(srgb_to_linear(i / 255.0));
    return t;
  }();
  return table;
}

std::uint8_t quantize_unit(double value) {
  const double v = std::clamp(value, 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::nearbyint(v));
}

Hsl rgb_to_hsl(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double l = (mx + mn) / 2.0;
  if (mx == mn) return {0.0, 0.0, l};
  const double d = mx - mn;
  const double s = d / (1.0 - std::fabs(2.0 * l - 1.0));
  double h;
  if (mx == r) {
    h = std::fmod((g - b) / d, 6.0);
    if (h < 0) h += 6.0;
  } else if (mx == g) {
    h = (b - r) / d + 2.0;
  } else {
    h = (r - g) / d + 4.0;
  }
  return {h * 60.0, std::min(1.0, s), l};
}

std::array<double, 3> hsl_to_rgb(const Hsl& hsl) {
  const double c = (1.0 - std::fabs(2.0 * hsl.l - 1.0)) * hsl.s;
  double h = std::fmod(hsl.h, 360.0);
  if (h < 0) h += 360.0;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = hsl.l - c / 2.0;
  return {r + m, g + m, b + m};
}

std::array<double, 3> kelvin_to_rgb(double kelvin) {
  const double t = kelvin / 100.0;
  double r, g, b;
  if (t <= 66.0) {
    r = 255.0;
    g = 99.4708025861 * std::log(t) - 161.1195681661;
  } else {
    r = 329.698727446 * std::pow(t - 60.0, -0.1332047592);
    g = 288.1221695283 * std::pow(t - 60.0, -0.0755148492);
  }
  if (t >= 66.0) {
    b = 255.0;
  } else if (t <= 19.0) {
    b = 0.0;
  } else {
    b = 138.5177312231 * std::log(t - 10.0) - 305.0447927307;
  }
  auto unit = [](double v) { return std::clamp(v, 0.0, 255.0) / 255.0; };
  return {unit(r), unit(g), unit(b)};
}

}  // namespace photoart
