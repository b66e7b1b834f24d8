#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "engine/image.hpp"
#include "gateway/gateway.hpp"
#include "params/params.hpp"

namespace photoart {

enum class StyleSource { kText, kReferenceImage, kReferenceParams };

struct StyleDirective {
  StyleSource source = StyleSource::kText;
  std::string text;  // non-empty, at most kMaxDirectiveLength characters
  std::optional<RetouchParams> params;
};

inline constexpr std::size_t kMaxDirectiveLength = 2000;

std::string_view style_source_name(StyleSource source);

StyleDirective style_from_text(std::string text);

// One style_parse call describing the reference's palette, tone and mood.
StyleDirective parse_reference_image(Gateway& gateway, const Image& reference, double temperature = 0.7);
StyleDirective parse_reference_image(Gateway& gateway, std::span<const std::uint8_t> encoded,
                                     double temperature = 0.7);

// Local and deterministic: the reference's non-identity parameters plus the
// tone findings of its image. Throws Error(kValidation) for invalid params.
StyleDirective parse_reference_case(const Image& reference, const RetouchParams& params);

}  // namespace photoart
