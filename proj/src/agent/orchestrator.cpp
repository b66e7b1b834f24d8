#include "agent/orchestrator.hpp"

#include "agent/prompts.hpp"
#include "common/error.hpp"
#include "engine/render.hpp"
#include "histogram/histogram.hpp"

namespace photoart {

namespace {

using json = nlohmann::json;

json report_brief(const HistogramReport& r) {
  return {{"pooled_mean", r.pooled_mean},
          {"midtone_fraction", r.midtone_fraction},
          {"warm_cool_bias", r.warm_cool_bias},
          {"dominant_channel", r.dominant_channel},
          {"black_point", r.black_point},
          {"white_point", r.white_point}};
}

std::string stage_text(const json& payload, const char* key) { return payload.at(key).get<std::string>(); }

}  // namespace

Orchestrator::Orchestrator(Gateway& gateway, ImageStore& images, AgentOptions options)
    : gateway_(gateway), images_(images), options_(options) {
  if (options_.max_iterations < 1) fail(ErrorCode::kInvalidArgument, "max_iterations must be at least 1");
}

SessionState Orchestrator::start(const Image& source, std::string instruction, EventLog& log) const {
  if (source.empty()) fail(ErrorCode::kInvalidArgument, "source image is empty");
  SessionState s;
  s.source_digest = images_.put(source);
  s.source_report = compute_histogram(source);
  s.source_histogram_digest = images_.put(render_histogram_image(s.source_report));
  s.max_iterations = options_.max_iterations;
  s.instruction = std::move(instruction);
  s.stage = Stage::kContentDescription;
  log.append("stage_entered", std::string(stage_name(s.stage)), 0,
             {{"from", nullptr}, {"source_digest", s.source_digest}});
  s.event_count = log.size();
  return s;
}

void Orchestrator::transition(SessionState& s, Stage to, EventLog& log) const {
  if (!is_edge(s.stage, to)) {
    fail(ErrorCode::kInternal,
         "illegal transition " + std::string(stage_name(s.stage)) + " -> " + std::string(stage_name(to)));
  }
  const auto from = s.stage;
  s.stage = to;
  const int iteration = s.iterations.empty() ? 0 : s.iterations.back().index;
  if (to != Stage::kFailed) {
    log.append("stage_entered", std::string(stage_name(to)), iteration, {{"from", stage_name(from)}});
  }
}

BackendResponse Orchestrator::call(const SessionState& s, std::string_view stage, int iteration,
                                   std::vector<std::pair<std::string, std::string>> images,
                                   std::map<std::string, std::string> fields, json context) {
  BackendRequest req;
  req.stage = std::string(stage);
  req.iteration = iteration;
  req.schema_id = req.stage;
  req.temperature = options_.temperature;
  req.max_tokens = options_.max_tokens;
  std::string roles;
  for (auto& [role, digest] : images) {
    req.images.push_back({role, digest, images_.get_png(digest)});
    roles += (roles.empty() ? "" : ", ") + role;
  }
  fields["images"] = roles;
  fields.emplace("instruction", s.instruction);
  fields.emplace("iteration", std::to_string(iteration));
  fields.emplace("max_iterations", std::to_string(s.max_iterations));
  fields.emplace("plan", s.plan);
  req.system_prompt = system_prompt();
  req.user_prompt = render_template(stage_template(stage), fields);
  req.context = std::move(context);
  return gateway_.complete(req);
}

void Orchestrator::advance(SessionState& s, EventLog& log) {
  if (is_terminal(s.stage)) {
    fail(ErrorCode::kWrongStage, "session is " + std::string(stage_name(s.stage)));
  }
  if (s.stage == Stage::kAwaitUserDirection) {
    fail(ErrorCode::kWrongStage, "session is waiting for a user direction");
  }
  try {
    switch (s.stage) {
      case Stage::kContentDescription: content_description(s, log); break;
      case Stage::kStrategyProposal: strategy_proposal(s, log); break;
      case Stage::kFinalPlan: final_plan(s, log); break;
      case Stage::kToneAnalysis: tone_analysis(s, log); break;
      case Stage::kParamGeneration: param_generation(s, log); break;
      case Stage::kRender: render_stage(s, log); break;
      case Stage::kReflection: reflection(s, log); break;
      case Stage::kSummary: summary(s, log); break;
      default: fail(ErrorCode::kInternal, "no handler for stage");
    }
  } catch (const Error& e) {
    const auto at = s.stage;
    s.failure = std::string(stage_name(at)) + ": " + e.what();
    transition(s, Stage::kFailed, log);
    log.append("failed", std::string(stage_name(at)), s.iterations.empty() ? 0 : s.iterations.back().index,
               {{"error", s.failure}, {"code", static_cast<int>(e.code())}});
    s.event_count = log.size();
    throw;
  }
  s.event_count = log.size();
}

void Orchestrator::inject_direction(SessionState& s, const Direction& d, EventLog& log) const {
  if (s.stage != Stage::kAwaitUserDirection) {
    fail(ErrorCode::kWrongStage,
         "direction is only accepted while awaiting it; session is at " + std::string(stage_name(s.stage)));
  }
  if (d.approach_index) {
    const int n = static_cast<int>(s.approaches.size());
    if (*d.approach_index < 1 || *d.approach_index > n) {
      fail(ErrorCode::kValidation, "approach_index must be between 1 and " + std::to_string(n));
    }
  } else if (d.text.empty()) {
    fail(ErrorCode::kValidation, "direction text is empty");
  }
  s.direction = d;
  const std::string text = d.approach_index
                               ? "Selected approach " + std::to_string(*d.approach_index) + ": " +
                                     s.approaches[*d.approach_index - 1].name
                               : d.text;
  log.append("text_emitted", std::string(stage_name(s.stage)), 0,
             {{"source", "user"}, {"text", text}, {"direction", d.to_json()}});
  transition(s, Stage::kFinalPlan, log);
  s.event_count = log.size();
}

void Orchestrator::run_to_completion(SessionState& s, EventLog& log, const Direction& auto_select) {
  while (!is_terminal(s.stage)) {
    if (s.stage == Stage::kAwaitUserDirection) {
      inject_direction(s, auto_select, log);
    } else {
      advance(s, log);
    }
  }
}

void Orchestrator::content_description(SessionState& s, EventLog& log) {
  const auto findings = summarize_tone(s.source_report);
  const auto r = call(s, "content_description", 0, {{"source", s.source_digest}},
                      {{"findings", to_json_value(findings).dump()}},
                      {{"instruction", s.instruction},
                       {"findings", to_json_value(findings)},
                       {"report", report_brief(s.source_report)}});
  s.description = stage_text(r.payload, "description");
  log.append("text_emitted", "content_description", 0, {{"source", "agent"}, {"text", s.description}});
  transition(s, Stage::kStrategyProposal, log);
}

void Orchestrator::strategy_proposal(SessionState& s, EventLog& log) {
  const auto findings = summarize_tone(s.source_report);
  const auto r = call(s, "strategy_proposal", 0, {{"source", s.source_digest}},
                      {{"findings", to_json_value(findings).dump()}, {"description", s.description}},
                      {{"instruction", s.instruction},
                       {"description", s.description},
                       {"findings", to_json_value(findings)},
                       {"report", report_brief(s.source_report)}});
  s.strategy_analysis = stage_text(r.payload, "analysis");
  s.approaches.clear();
  for (const auto& a : r.payload.at("approaches")) {
    s.approaches.push_back({a.at("name").get<std::string>(), a.at("light").get<std::string>(),
                            a.at("color").get<std::string>(), a.at("channels").get<std::string>()});
  }
  std::string text = s.strategy_analysis;
  for (std::size_t i = 0; i < s.approaches.size(); ++i) {
    const auto& a = s.approaches[i];
    text += "\n" + std::to_string(i + 1) + ". " + a.name + ": " + a.light + "; " + a.color + "; " + a.channels;
  }
  log.append("text_emitted", "strategy_proposal", 0,
             {{"source", "agent"}, {"text", text}, {"approaches", r.payload.at("approaches")}});
  transition(s, Stage::kAwaitUserDirection, log);
}

void Orchestrator::final_plan(SessionState& s, EventLog& log) {
  if (!s.direction) fail(ErrorCode::kInternal, "final plan without a direction");
  json approaches = json::array();
  for (const auto& a : s.approaches) {
    approaches.push_back({{"name", a.name}, {"light", a.light}, {"color", a.color}, {"channels", a.channels}});
  }
  std::string direction_text = s.direction->approach_index
                                   ? "approach " + std::to_string(*s.direction->approach_index)
                                   : s.direction->text;
  std::string style;
  for (const auto& d : s.style_directives) style += (style.empty() ? "" : "\n") + d;
  const auto r = call(s, "final_plan", 0, {{"source", s.source_digest}},
                      {{"approaches", approaches.dump()}, {"direction", direction_text}, {"style", style}},
                      {{"instruction", s.instruction},
                       {"approaches", approaches},
                       {"direction", s.direction->to_json()},
                       {"style", s.style_directives}});
  s.plan = stage_text(r.payload, "plan");
  log.append("text_emitted", "final_plan", 0, {{"source", "agent"}, {"text", s.plan}});
  transition(s, Stage::kToneAnalysis, log);
}

void Orchestrator::tone_analysis(SessionState& s, EventLog& log) {
  const int index = static_cast<int>(s.iterations.size()) + 1;
  const std::string current = s.current_digest();
  const HistogramReport report = s.iterations.empty() ? s.source_report : *s.iterations.back().report;
  const std::string histogram = s.iterations.empty() ? s.source_histogram_digest
                                                     : s.iterations.back().histogram_digest;
  const auto findings = summarize_tone(report);
  const auto r = call(s, "tone_analysis", index, {{"current", current}, {"histogram", histogram}},
                      {{"findings", to_json_value(findings).dump()}},
                      {{"iteration", index}, {"findings", to_json_value(findings)}, {"report", report_brief(report)}});
  IterationRecord rec;
  rec.index = index;
  rec.analysis = stage_text(r.payload, "analysis");
  rec.input_findings = findings;
  s.iterations.push_back(std::move(rec));
  log.append("text_emitted", "tone_analysis", index,
             {{"source", "agent"}, {"text", s.iterations.back().analysis}, {"findings", to_json_value(findings)}});
  transition(s, Stage::kParamGeneration, log);
}

void Orchestrator::param_generation(SessionState& s, EventLog& log) {
  auto& rec = s.iterations.back();
  const RetouchParams previous = s.iterations.size() > 1 ? s.iterations[s.iterations.size() - 2].params
                                                         : RetouchParams::identity();
  std::string critique;
  json directives = json::array();
  if (s.iterations.size() > 1) {
    const auto& v = s.iterations[s.iterations.size() - 2].verdict;
    if (v) {
      critique = v->critique;
      for (const auto& d : v->directives) directives.push_back({{"field", d.field}, {"direction", d.direction}});
    }
  }
  const std::string current = s.current_digest();
  const std::string histogram = s.iterations.size() > 1 ? s.iterations[s.iterations.size() - 2].histogram_digest
                                                        : s.source_histogram_digest;
  const auto r = call(s, "param_generation", rec.index, {{"current", current}, {"histogram", histogram}},
                      {{"analysis", rec.analysis},
                       {"previous_params", to_json(previous)},
                       {"critique", critique}},
                      {{"iteration", rec.index},
                       {"findings", to_json_value(rec.input_findings)},
                       {"previous_params", to_json_value(previous)},
                       {"critique", critique},
                       {"directives", directives}});
  rec.params = from_json_value(r.payload.at("params")).params;
  rec.rationale = stage_text(r.payload, "rationale");
  log.append("params_proposed", "param_generation", rec.index,
             {{"params", to_json_value(rec.params)},
              {"diff", diff_to_json(diff(previous, rec.params))},
              {"rationale", rec.rationale}});
  log.append("text_emitted", "param_generation", rec.index, {{"source", "agent"}, {"text", rec.rationale}});
  transition(s, Stage::kRender, log);
}

void Orchestrator::render_stage(SessionState& s, EventLog& log) {
  auto& rec = s.iterations.back();
  const auto source = images_.get(s.source_digest);
  const auto result = render(source, rec.params);
  rec.image_digest = images_.put(result.image);
  rec.report = compute_histogram(result.image);
  rec.findings = summarize_tone(*rec.report);
  rec.histogram_digest = images_.put(render_histogram_image(*rec.report));
  rec.render_trace = result.trace.describe();
  log.append("image_rendered", "render", rec.index,
             {{"image_digest", rec.image_digest},
              {"histogram_digest", rec.histogram_digest},
              {"findings", to_json_value(rec.findings)}});
  log.append("text_emitted", "render", rec.index, {{"source", "engine"}, {"text", rec.render_trace}});
  transition(s, Stage::kReflection, log);
}

void Orchestrator::reflection(SessionState& s, EventLog& log) {
  auto& rec = s.iterations.back();
  const auto r = call(s, "reflection", rec.index,
                      {{"source", s.source_digest}, {"current", rec.image_digest}, {"histogram", rec.histogram_digest}},
                      {{"findings", to_json_value(rec.findings).dump()}, {"previous_params", to_json(rec.params)}},
                      {{"iteration", rec.index},
                       {"max_iterations", s.max_iterations},
                       {"findings", to_json_value(rec.findings)},
                       {"report", report_brief(*rec.report)},
                       {"params", to_json_value(rec.params)}});
  Verdict v;
  v.satisfactory = r.payload.at("satisfactory").get<bool>();
  v.critique = stage_text(r.payload, "critique");
  for (const auto& d : r.payload.value("directives", json::array())) {
    v.directives.push_back({d.at("field").get<std::string>(), d.at("direction").get<std::string>()});
  }
  rec.verdict = v;
  json directives = json::array();
  for (const auto& d : v.directives) directives.push_back({{"field", d.field}, {"direction", d.direction}});
  log.append("verdict", "reflection", rec.index,
             {{"satisfactory", v.satisfactory}, {"critique", v.critique}, {"directives", directives}});
  log.append("text_emitted", "reflection", rec.index, {{"source", "agent"}, {"text", v.critique}});
  if (v.satisfactory) {
    s.outcome = "satisfactory";
    transition(s, Stage::kSummary, log);
  } else if (rec.index < s.max_iterations) {
    transition(s, Stage::kToneAnalysis, log);
  } else {
    s.outcome = "cap_reached";
    transition(s, Stage::kSummary, log);
  }
}

void Orchestrator::summary(SessionState& s, EventLog& log) {
  if (s.iterations.empty() || !s.iterations.back().verdict) {
    fail(ErrorCode::kWrongStage, "summary needs at least one completed iteration");
  }
  json iterations = json::array();
  for (const auto& it : s.iterations) {
    iterations.push_back({{"index", it.index},
                          {"params", to_json_value(it.params)},
                          {"satisfactory", it.verdict && it.verdict->satisfactory},
                          {"critique", it.verdict ? it.verdict->critique : ""}});
  }
  const auto r = call(s, "summary", 0, {{"source", s.source_digest}, {"current", s.current_digest()}},
                      {{"iterations", iterations.dump()}},
                      {{"iterations", iterations}, {"outcome", s.outcome}});
  s.summary = stage_text(r.payload, "summary");
  log.append("text_emitted", "summary", 0, {{"source", "agent"}, {"text", s.summary}});
  transition(s, Stage::kDone, log);
  log.append("done", "done", s.iterations.back().index,
             {{"outcome", s.outcome},
              {"iterations", s.iterations.size()},
              {"final_image_digest", s.current_digest()}});
}

std::vector<std::pair<Stage, Stage>> observed_transitions(const std::vector<Event>& events) {
  std::vector<std::pair<Stage, Stage>> out;
  std::optional<Stage> last;
  for (const auto& e : events) {
    if (e.type == "failed") {
      if (last) out.emplace_back(*last, Stage::kFailed);
      continue;
    }
    if (e.type != "stage_entered") continue;
    const auto to = stage_from_name(e.stage);
    if (!to) continue;
    if (last) out.emplace_back(*last, *to);
    last = to;
  }
  return out;
}

}  // namespace photoart
