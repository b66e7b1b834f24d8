#pragma once

#include <string>

#include "agent/events.hpp"
#include "agent/image_store.hpp"
#include "agent/state.hpp"
#include "engine/image.hpp"
#include "gateway/gateway.hpp"

namespace photoart {

struct AgentOptions {
  double temperature = 0.7;
  int max_tokens = 2048;
  int max_iterations = 5;
};

/// Drives one session through the stage graph. Each advance() executes one
/// stage: a model call through the gateway, or the engine for Render.
class Orchestrator {
 public:
  Orchestrator(Gateway& gateway, ImageStore& images, AgentOptions options);

  // Stores the source and precomputes its histogram. The session starts at
  // ContentDescription.
  SessionState start(const Image& source, std::string instruction, EventLog& log) const;

  // Runs the current stage. Errors move the session to Failed, are logged as
  // a failed event and rethrown.
  void advance(SessionState& state, EventLog& log);

  // Accepts the user's direction at AwaitUserDirection; wrong stage throws
  // Error(kWrongStage), an index outside 1..3 throws Error(kValidation).
  void inject_direction(SessionState& state, const Direction& direction, EventLog& log) const;

  // Advances until Done/Failed, answering AwaitUserDirection with
  // `auto_select`.
  void run_to_completion(SessionState& state, EventLog& log, const Direction& auto_select);

  const AgentOptions& options() const { return options_; }

 private:
  void content_description(SessionState& s, EventLog& log);
  void strategy_proposal(SessionState& s, EventLog& log);
  void final_plan(SessionState& s, EventLog& log);
  void tone_analysis(SessionState& s, EventLog& log);
  void param_generation(SessionState& s, EventLog& log);
  void render_stage(SessionState& s, EventLog& log);
  void reflection(SessionState& s, EventLog& log);
  void summary(SessionState& s, EventLog& log);

  BackendResponse call(const SessionState& s, std::string_view stage, int iteration,
                       std::vector<std::pair<std::string, std::string>> images,
                       std::map<std::string, std::string> fields, nlohmann::json context);
  void transition(SessionState& s, Stage to, EventLog& log) const;

  Gateway& gateway_;
  ImageStore& images_;
  AgentOptions options_;
};

// Events are emitted as the stage machine runs; these helpers read them back.
std::vector<std::pair<Stage, Stage>> observed_transitions(const std::vector<Event>& events);

}  // namespace photoart
