#include <algorithm>
#include <cmath>
#include <cstdio>

#include "common/error.hpp"
#include "gateway/gateway.hpp"
#include "params/params.hpp"

namespace photoart {

namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::vector<std::string> finding_names(const json& context) {
  std::vector<std::string> out;
  for (const auto& f : context.value("findings", json::array())) out.push_back(f.value("finding", ""));
  return out;
}

bool has(const std::vector<std::string>& names, std::string_view f) {
  return std::find(names.begin(), names.end(), f) != names.end();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string describe_finding(const json& f) {
  const auto name = f.value("finding", "");
  const double v = f.value("value", 0.0);
  const double t = f.value("threshold", 0.0);
  if (name == "underexposed") return "mean level " + num(v) + " is below " + num(t);
  if (name == "overexposed") return "mean level " + num(v) + " is above " + num(t);
  if (name == "shadow_clipping") return num(100 * v) + "% of values sit at 0, crushing shadows";
  if (name == "highlight_clipping") return num(100 * v) + "% of values sit at 255, clipping highlights";
  if (name == "low_contrast") return "tonal range spans only " + num(v) + " levels";
  if (name == "high_contrast") return "only " + num(100 * v) + "% of values are midtones";
  if (name == "warm_bias") return "red exceeds blue by " + num(v) + ", a warm cast";
  if (name == "cool_bias") return "blue exceeds red by " + num(-v) + ", a cool cast";
  if (name == "green_bias") return "green leads by " + num(v) + ", a green cast";
  if (name == "magenta_bias") return "green trails by " + num(-v) + ", a magenta cast";
  if (name == "balanced") return "exposure and color balance are within range";
  return name;
}

std::string findings_sentence(const json& context) {
  std::vector<std::string> parts;
  for (const auto& f : context.value("findings", json::array())) parts.push_back(describe_finding(f));
  return parts.empty() ? std::string("No histogram findings.") : join(parts, "; ") + ".";
}

struct Rule {
  std::string_view finding;
  std::string_view field;
  double step;
  std::string_view direction;
  std::string_view reason;
};

// Cumulative adjustments applied to the previous parameter set.
constexpr Rule kRules[] = {
    {"underexposed", "basic.exposure", 0.8, "increase", "brighten the exposure"},
    {"overexposed", "basic.exposure", -0.8, "decrease", "darken the exposure"},
    {"highlight_clipping", "basic.highlights", -30, "decrease", "recover highlights"},
    {"shadow_clipping", "basic.shadows", 25, "increase", "open the shadows"},
    {"shadow_clipping", "basic.blacks", 10, "increase", "lift the black point"},
    {"low_contrast", "basic.contrast", 20, "increase", "add contrast"},
    {"high_contrast", "basic.contrast", -15, "decrease", "soften contrast"},
    {"warm_bias", "basic.temp", -500, "decrease", "cool the white balance"},
    {"cool_bias", "basic.temp", 500, "increase", "warm the white balance"},
    {"green_bias", "basic.tint", 10, "increase", "shift tint toward magenta"},
    {"magenta_bias", "basic.tint", -10, "decrease", "shift tint toward green"},
};

json param_generation(const json& context) {
  RetouchParams params;
  if (context.contains("previous_params") && !context["previous_params"].is_null()) {
    params = from_json_value(context["previous_params"]).params;
  }
  const auto names = finding_names(context);
  std::vector<std::string> reasons;
  for (const auto& rule : kRules) {
    if (!has(names, rule.finding)) continue;
    const auto index = *field_index(rule.field);
    const auto& info = param_fields()[index];
    double& v = field_ref(params, index);
    const double before = v;
    v = round2(std::clamp(v + rule.step, info.min, info.max));
    reasons.push_back(std::string(rule.reason) + " (" + std::string(rule.field) + " " + num(before) +
                      " -> " + num(v) + ")");
  }
  const std::string rationale =
      reasons.empty() ? std::string("No corrective rule applies; the previous settings are kept.")
                      : "Adjustments: " + join(reasons, "; ") + ".";
  return {{"rationale", rationale}, {"params", to_json_value(params)}};
}

json reflection(const json& context) {
  const auto names = finding_names(context);
  const int iteration = context.value("iteration", 1);
  const int cap = context.value("max_iterations", 5);
  if (has(names, "balanced") || iteration >= cap - 1) {
    std::string critique = has(names, "balanced")
                               ? "Satisfactory: " + findings_sentence(context)
                               : "Accepted at the iteration budget; remaining issues: " +
                                     findings_sentence(context);
    return {{"satisfactory", true}, {"critique", critique}, {"directives", json::array()}};
  }
  json directives = json::array();
  for (const auto& rule : kRules) {
    if (!has(names, rule.finding)) continue;
    directives.push_back({{"field", rule.field}, {"direction", rule.direction}});
  }
  return {{"satisfactory", false},
          {"critique", "Not yet satisfactory: " + findings_sentence(context)},
          {"directives", directives}};
}

json strategy_proposal(const json& context) {
  const auto names = finding_names(context);
  std::string light = "keep exposure";
  if (has(names, "underexposed")) light = "raise exposure and open shadows";
  if (has(names, "overexposed")) light = "lower exposure and recover highlights";
  std::string color = "keep white balance";
  if (has(names, "warm_bias")) color = "cool the white balance";
  if (has(names, "cool_bias")) color = "warm the white balance";
  return {{"analysis", findings_sentence(context)},
          {"approaches",
           json::array({
               {{"name", "Corrective"}, {"light", light}, {"color", color},
                {"channels", "leave the color mixer neutral"}},
               {{"name", "Vivid"}, {"light", light + ", add contrast"}, {"color", color + ", add vibrance"},
                {"channels", "lift saturation of the dominant hues"}},
               {{"name", "Muted"}, {"light", light + ", soften contrast"},
                {"color", color + ", reduce saturation"}, {"channels", "desaturate secondary hues"}},
           })}};
}

json final_plan(const json& context) {
  const auto direction = context.value("direction", json::object());
  std::string plan;
  if (direction.contains("approach_index")) {
    const int index = direction["approach_index"].get<int>();
    const auto approaches = context.value("approaches", json::array());
    if (index >= 1 && index <= static_cast<int>(approaches.size())) {
      const auto& a = approaches[index - 1];
      plan = "Approach " + std::to_string(index) + " (" + a.value("name", "") + "): " + a.value("light", "") +
             "; " + a.value("color", "") + "; " + a.value("channels", "") + ".";
    } else {
      plan = "Approach " + std::to_string(index) + ".";
    }
  } else {
    plan = "User direction: " + direction.value("text", std::string("none")) + ".";
  }
  const auto instruction = context.value("instruction", "");
  if (!instruction.empty()) plan += " Instruction: " + instruction + ".";
  const auto style = context.value("style", json::array());
  for (const auto& s : style) plan += " Style: " + s.get<std::string>();
  plan += " Correct histogram findings each iteration until the result is balanced.";
  return {{"plan", plan}};
}

json summary(const json& context) {
  const auto iterations = context.value("iterations", json::array());
  if (iterations.empty()) fail(ErrorCode::kInvalidArgument, "summary needs at least one iteration");
  const auto& last = iterations.back();
  const auto changes = diff(RetouchParams::identity(), from_json_value(last.at("params")).params);
  std::vector<std::string> parts;
  for (const auto& c : changes.changes) parts.push_back(c.field + " " + num(c.new_value));
  std::string text = "Ran " + std::to_string(iterations.size()) + " iteration(s). Final settings: " +
                     (parts.empty() ? std::string("identity") : join(parts, ", ")) + ". ";
  text += last.value("satisfactory", false) ? "The last reflection was satisfactory."
                                            : "Stopped at the iteration cap.";
  return {{"summary", text}};
}

json style_parse(const json& context) {
  const auto report = context.value("report", json::object());
  const double mean = report.value("pooled_mean", 0.5);
  const double bias = report.value("warm_cool_bias", 0.0);
  std::vector<std::string> palette;
  if (mean < 96.0 / 255.0) palette.push_back("dark");
  if (mean > 176.0 / 255.0) palette.push_back("bright");
  if (bias < -0.06) palette.push_back("cool");
  if (bias > 0.06) palette.push_back("warm");
  if (palette.empty()) palette.push_back("neutral");
  const auto names = finding_names(context);
  std::string tone = "mean level " + num(mean);
  if (has(names, "low_contrast")) tone += ", compressed range";
  if (has(names, "high_contrast")) tone += ", strong contrast";
  json treatments = json::array();
  for (const auto& n : names) {
    if (n != "balanced") treatments.push_back(n);
  }
  return {{"palette", join(palette, ", ")},
          {"tonal_character", tone},
          {"mood", mean < 96.0 / 255.0 ? "subdued" : (mean > 176.0 / 255.0 ? "airy" : "even")},
          {"notable_treatments", treatments}};
}

}  // namespace

json HeuristicBackend::respond(std::string_view stage, const json& context) {
  if (stage == "content_description") {
    const auto report = context.value("report", json::object());
    std::string d = "Photograph with mean level " + num(report.value("pooled_mean", 0.0)) +
                    ", dominant channel " + report.value("dominant_channel", std::string("none")) +
                    ", and " + num(100 * report.value("midtone_fraction", 0.0)) + "% midtones. " +
                    findings_sentence(context);
    return {{"description", d}, {"subjects", json::array()}};
  }
  if (stage == "strategy_proposal") return strategy_proposal(context);
  if (stage == "final_plan") return final_plan(context);
  if (stage == "tone_analysis") {
    return {{"analysis", findings_sentence(context)}, {"findings", finding_names(context)}};
  }
  if (stage == "param_generation") return param_generation(context);
  if (stage == "reflection") return reflection(context);
  if (stage == "summary") return summary(context);
  if (stage == "style_parse") return style_parse(context);
  fail(ErrorCode::kInvalidArgument, "heuristic backend has no rule for stage '" + std::string(stage) + "'");
}

BackendResponse HeuristicBackend::complete(const BackendRequest& request) {
  BackendResponse r;
  r.text = respond(request.stage, request.context).dump();
  return r;
}

}  // namespace photoart
