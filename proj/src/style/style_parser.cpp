#include "style/style_parser.hpp"

#include <cstdio>

#include "agent/prompts.hpp"
#include "common/error.hpp"
#include "histogram/histogram.hpp"

namespace photoart {

namespace {

std::string bounded(std::string text) {
  if (text.size() > kMaxDirectiveLength) {
    text.resize(kMaxDirectiveLength - 3);
    // keep UTF-8 sequences whole
    while (!text.empty() && (static_cast<unsigned char>(text.back()) & 0xC0) == 0x80) text.pop_back();
    if (!text.empty() && (static_cast<unsigned char>(text.back()) & 0x80)) text.pop_back();
    text += "...";
  }
  return text;
}

std::string signed_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+g", v);
  return buf;
}

std::string kelvin_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%gK", v);
  return buf;
}

std::string short_name(const std::string& path) {
  // "basic.highlights" -> "highlights", "mixer.blue.luminance" -> "blue luminance"
  auto rest = path.substr(path.find('.') + 1);
  for (auto& c : rest) {
    if (c == '.') c = ' ';
  }
  return rest;
}

}  // namespace

std::string_view style_source_name(StyleSource source) {
  switch (source) {
    case StyleSource::kText: return "text";
    case StyleSource::kReferenceImage: return "reference_image";
    case StyleSource::kReferenceParams: return "reference_params";
  }
  return "text";
}

StyleDirective style_from_text(std::string text) {
  if (text.empty()) fail(ErrorCode::kValidation, "style text is empty");
  return {StyleSource::kText, bounded(std::move(text)), std::nullopt};
}

StyleDirective parse_reference_image(Gateway& gateway, std::span<const std::uint8_t> encoded,
                                     double temperature) {
  if (encoded.empty()) fail(ErrorCode::kInvalidArgument, "reference image is empty");
  return parse_reference_image(gateway, decode_image(encoded), temperature);
}

StyleDirective parse_reference_image(Gateway& gateway, const Image& reference, double temperature) {
  if (reference.empty()) fail(ErrorCode::kInvalidArgument, "reference image is empty");
  const auto report = compute_histogram(reference);
  const auto findings = summarize_tone(report);

  BackendRequest req;
  req.stage = "style_parse";
  req.schema_id = "style_parse";
  req.temperature = temperature;
  req.images.push_back({"reference", image_digest(reference), encode_png(reference)});
  req.system_prompt = system_prompt();
  req.user_prompt = render_template(stage_template("style_parse"),
                                    {{"images", "reference"}, {"findings", to_json_value(findings).dump()}});
  req.context = {{"findings", to_json_value(findings)},
                 {"report",
                  {{"pooled_mean", report.pooled_mean},
                   {"warm_cool_bias", report.warm_cool_bias},
                   {"midtone_fraction", report.midtone_fraction},
                   {"dominant_channel", report.dominant_channel}}}};
  const auto r = gateway.complete(req);
  const auto& p = r.payload;
  std::string text = "Reference style: palette " + p.at("palette").get<std::string>() + "; tonal character " +
                     p.at("tonal_character").get<std::string>() + "; mood " + p.at("mood").get<std::string>();
  const auto treatments = p.value("notable_treatments", nlohmann::json::array());
  if (!treatments.empty()) {
    text += "; treatments:";
    for (std::size_t i = 0; i < treatments.size(); ++i) {
      text += (i ? ", " : " ") + treatments[i].get<std::string>();
    }
  }
  text += ".";
  return {StyleSource::kReferenceImage, bounded(std::move(text)), std::nullopt};
}

StyleDirective parse_reference_case(const Image& reference, const RetouchParams& params) {
  if (const auto v = validate(params); !v.ok()) fail(ErrorCode::kValidation, v.message());
  if (reference.empty()) fail(ErrorCode::kInvalidArgument, "reference image is empty");
  const auto findings = summarize_tone(compute_histogram(reference));
  const auto changes = diff(RetouchParams::identity(), params);
  std::string text;
  if (changes.empty()) {
    text = "Reference case: identity parameters, a no-op baseline.";
  } else {
    text = "Reference case parameters:";
    for (std::size_t i = 0; i < changes.changes.size(); ++i) {
      const auto& c = changes.changes[i];
      const bool kelvin = c.field == "basic.temp";
      text += (i ? ", " : " ") + short_name(c.field) + " " +
              (kelvin ? kelvin_text(c.new_value) : signed_number(c.new_value));
    }
    text += ".";
  }
  const auto names = findings.names();
  text += " Reference tone:";
  for (std::size_t i = 0; i < names.size(); ++i) text += (i ? ", " : " ") + names[i];
  text += ".";
  return {StyleSource::kReferenceParams, bounded(std::move(text)), params};
}

}  // namespace photoart
