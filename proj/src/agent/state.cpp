#include "agent/state.hpp"

#include <array>

#include "common/error.hpp"

namespace photoart {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 11> kStageNames = {
    "content_description", "strategy_proposal", "await_user_direction", "final_plan",
    "tone_analysis",       "param_generation",  "render",               "reflection",
    "summary",             "done",              "failed"};

json verdict_json(const Verdict& v) {
  json directives = json::array();
  for (const auto& d : v.directives) directives.push_back({{"field", d.field}, {"direction", d.direction}});
  return {{"satisfactory", v.satisfactory}, {"critique", v.critique}, {"directives", directives}};
}

Verdict verdict_from(const json& j) {
  Verdict v;
  v.satisfactory = j.at("satisfactory").get<bool>();
  v.critique = j.at("critique").get<std::string>();
  for (const auto& d : j.at("directives")) {
    v.directives.push_back({d.at("field").get<std::string>(), d.at("direction").get<std::string>()});
  }
  return v;
}

Stage stage_or_fail(const json& j) {
  const auto s = stage_from_name(j.get<std::string>());
  if (!s) fail(ErrorCode::kParse, "unknown stage " + j.dump());
  return *s;
}

}  // namespace

std::string_view stage_name(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

std::optional<Stage> stage_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

bool is_edge(Stage from, Stage to) {
  using S = Stage;
  if (to == S::kFailed) return from != S::kDone && from != S::kFailed;
  switch (from) {
    case S::kContentDescription: return to == S::kStrategyProposal;
    case S::kStrategyProposal: return to == S::kAwaitUserDirection;
    case S::kAwaitUserDirection: return to == S::kFinalPlan;
    case S::kFinalPlan: return to == S::kToneAnalysis;
    case S::kToneAnalysis: return to == S::kParamGeneration;
    case S::kParamGeneration: return to == S::kRender;
    case S::kRender: return to == S::kReflection;
    case S::kReflection: return to == S::kToneAnalysis || to == S::kSummary;
    case S::kSummary: return to == S::kDone;
    case S::kDone:
    case S::kFailed: return false;
  }
  return false;
}

bool is_terminal(Stage stage) { return stage == Stage::kDone || stage == Stage::kFailed; }

json Direction::to_json() const {
  if (approach_index) return {{"approach_index", *approach_index}};
  return {{"text", text}};
}

Direction Direction::from_json(const json& value) {
  Direction d;
  if (!value.is_object()) fail(ErrorCode::kValidation, "direction must be an object");
  const bool has_index = value.contains("approach_index");
  const bool has_text = value.contains("text");
  if (has_index == has_text) {
    fail(ErrorCode::kValidation, "direction needs exactly one of approach_index or text");
  }
  if (has_index) {
    if (!value["approach_index"].is_number_integer()) {
      fail(ErrorCode::kValidation, "approach_index must be an integer");
    }
    d.approach_index = value["approach_index"].get<int>();
  } else {
    if (!value["text"].is_string() || value["text"].get<std::string>().empty()) {
      fail(ErrorCode::kValidation, "direction text must be a non-empty string");
    }
    d.text = value["text"].get<std::string>();
  }
  return d;
}

const std::string& SessionState::current_digest() const {
  for (auto it = iterations.rbegin(); it != iterations.rend(); ++it) {
    if (!it->image_digest.empty()) return it->image_digest;
  }
  return source_digest;
}

json to_json(const SessionState& s) {
  json approaches = json::array();
  for (const auto& a : s.approaches) {
    approaches.push_back({{"name", a.name}, {"light", a.light}, {"color", a.color}, {"channels", a.channels}});
  }
  json iterations = json::array();
  for (const auto& it : s.iterations) {
    iterations.push_back({
        {"index", it.index},
        {"analysis", it.analysis},
        {"input_findings", to_json_value(it.input_findings)},
        {"params", to_json_value(it.params)},
        {"rationale", it.rationale},
        {"image_digest", it.image_digest},
        {"histogram_digest", it.histogram_digest},
        {"report", it.report ? json(to_json_value(*it.report)) : json(nullptr)},
        {"findings", to_json_value(it.findings)},
        {"render_trace", it.render_trace},
        {"verdict", it.verdict ? verdict_json(*it.verdict) : json(nullptr)},
    });
  }
  return {
      {"id", s.id},
      {"stage", stage_name(s.stage)},
      {"source_digest", s.source_digest},
      {"source_histogram_digest", s.source_histogram_digest},
      {"source_report", to_json_value(s.source_report)},
      {"max_iterations", s.max_iterations},
      {"instruction", s.instruction},
      {"style_directives", s.style_directives},
      {"description", s.description},
      {"strategy_analysis", s.strategy_analysis},
      {"approaches", approaches},
      {"direction", s.direction ? s.direction->to_json() : json(nullptr)},
      {"plan", s.plan},
      {"iterations", iterations},
      {"summary", s.summary},
      {"outcome", s.outcome},
      {"failure", s.failure},
      {"in_flight", s.in_flight ? json(stage_name(*s.in_flight)) : json(nullptr)},
      {"event_count", s.event_count},
      {"transcript_count", s.transcript_count},
  };
}

SessionState session_from_json(const json& j) {
  try {
    SessionState s;
    s.id = j.at("id").get<std::string>();
    s.stage = stage_or_fail(j.at("stage"));
    s.source_digest = j.at("source_digest").get<std::string>();
    s.source_histogram_digest = j.at("source_histogram_digest").get<std::string>();
    s.source_report = report_from_json(j.at("source_report"));
    s.max_iterations = j.at("max_iterations").get<int>();
    s.instruction = j.at("instruction").get<std::string>();
    s.style_directives = j.at("style_directives").get<std::vector<std::string>>();
    s.description = j.at("description").get<std::string>();
    s.strategy_analysis = j.at("strategy_analysis").get<std::string>();
    for (const auto& a : j.at("approaches")) {
      s.approaches.push_back({a.at("name").get<std::string>(), a.at("light").get<std::string>(),
                              a.at("color").get<std::string>(), a.at("channels").get<std::string>()});
    }
    if (!j.at("direction").is_null()) s.direction = Direction::from_json(j["direction"]);
    s.plan = j.at("plan").get<std::string>();
    for (const auto& r : j.at("iterations")) {
      IterationRecord it;
      it.index = r.at("index").get<int>();
      it.analysis = r.at("analysis").get<std::string>();
      it.input_findings = findings_from_json(r.at("input_findings"));
      it.params = from_json_value(r.at("params")).params;
      it.rationale = r.at("rationale").get<std::string>();
      it.image_digest = r.at("image_digest").get<std::string>();
      it.histogram_digest = r.at("histogram_digest").get<std::string>();
      if (!r.at("report").is_null()) it.report = report_from_json(r["report"]);
      it.findings = findings_from_json(r.at("findings"));
      it.render_trace = r.at("render_trace").get<std::string>();
      if (!r.at("verdict").is_null()) it.verdict = verdict_from(r["verdict"]);
      s.iterations.push_back(std::move(it));
    }
    s.summary = j.at("summary").get<std::string>();
    s.outcome = j.at("outcome").get<std::string>();
    s.failure = j.at("failure").get<std::string>();
    if (!j.at("in_flight").is_null()) s.in_flight = stage_or_fail(j["in_flight"]);
    s.event_count = j.at("event_count").get<std::uint64_t>();
    s.transcript_count = j.at("transcript_count").get<std::size_t>();
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("session snapshot: ") + e.what());
  }
}

}  // namespace photoart
